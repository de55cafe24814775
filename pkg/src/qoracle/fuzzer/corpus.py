"""On-disk corpus: ``corpus/*.qasm`` for interesting circuits, ``failures/<id>.{qasm,json}`` for reproducers."""
from __future__ import annotations

import json
import os
from pathlib import Path

from ..circuit import Circuit
from ..oracles import Granularity, OracleId, ToleranceConfig, evaluate_circuit
from ..qasm import emit_qasm, load_qasm
from ..simulator import CorrectBackend
from .campaign import CORRECT, CampaignResult, Violation
from .mutants import MutantSpec, make_mutant

ENV_CORPUS = "QORACLE_CORPUS"
DEFAULT_CORPUS = "qoracle-corpus"


def default_corpus_dir() -> Path:
    return Path(os.environ.get(ENV_CORPUS, DEFAULT_CORPUS))


def failure_id(v: Violation) -> str:
    return f"t{v.trial:05d}-{v.backend_id}-{v.verdict.oracle_id.value.lower()}"


def write_failures(
    result: CampaignResult,
    root: Path,
    tol: ToleranceConfig,
    probes: int,
    granularity: Granularity,
    per_pair_limit: int = 3,
) -> list[str]:
    """Persist up to ``per_pair_limit`` reproducers per (backend, oracle) pair.

    Circuits that exposed a pair for the first time also land in ``corpus/``.
    """
    root = Path(root)
    (root / "failures").mkdir(parents=True, exist_ok=True)
    (root / "corpus").mkdir(parents=True, exist_ok=True)
    written, counts = [], {}
    for v in result.violations:
        key = (v.backend_id, v.verdict.oracle_id)
        counts[key] = counts.get(key, 0) + 1
        if counts[key] > per_pair_limit:
            continue
        fid = failure_id(v)
        meta = {
            "id": fid,
            "campaign_seed": result.seed,
            "trial": v.trial,
            "seed": v.probe_seed,
            "mutant_id": v.mutant.mutant_id.value if v.mutant else CORRECT,
            "mutant": v.mutant.to_dict() if v.mutant else None,
            "oracle_id": v.verdict.oracle_id.value,
            "measured": v.verdict.to_dict()["measured"],
            "location": v.verdict.location,
            "message": v.verdict.message,
            "probes": probes,
            "granularity": str(granularity),
            "tolerances": tol.values(),
            "instructions": len(v.circuit),
        }
        (root / "failures" / f"{fid}.qasm").write_text(emit_qasm(v.circuit), encoding="utf-8")
        (root / "failures" / f"{fid}.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        if counts[key] == 1:
            (root / "corpus" / f"trial-{v.trial:05d}.qasm").write_text(emit_qasm(v.circuit), encoding="utf-8")
        written.append(fid)
    return written


def load_failure(root: Path, fid: str) -> tuple[Circuit, dict]:
    base = Path(root) / "failures"
    meta_path, qasm_path = base / f"{fid}.json", base / f"{fid}.qasm"
    if not meta_path.exists() or not qasm_path.exists():
        raise FileNotFoundError(f"no failure {fid!r} under {base}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    return load_qasm(qasm_path), meta


def failure_predicate(meta: dict):
    """Rebuild "this circuit still fails the recorded oracle on the recorded backend"."""
    spec = MutantSpec.from_dict(meta["mutant"]) if meta.get("mutant") else None
    oracle = OracleId(meta["oracle_id"])
    tol = ToleranceConfig(**meta["tolerances"])
    granularity = Granularity.parse(meta["granularity"])
    probes, seed = int(meta["probes"]), int(meta["seed"])

    def fails(circuit: Circuit) -> bool:
        backend = make_mutant(spec) if spec else CorrectBackend()
        (verdict,) = evaluate_circuit(circuit, backend, tol, [oracle], granularity, probes, seed)
        return not verdict.passed

    return fails
