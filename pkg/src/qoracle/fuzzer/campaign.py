"""Fuzz campaigns: generate circuits, run every oracle on the correct backend and each mutant."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from ..circuit import Circuit
from ..oracles import (
    ALL_ORACLES,
    WHOLE,
    Granularity,
    OracleId,
    OracleVerdict,
    ToleranceConfig,
    evaluate_circuit,
)
from ..simulator import Backend, CorrectBackend
from .generator import GeneratorConfig, generate_circuit, mutate_circuit
from .mutants import MutantSpec, is_degenerate, make_mutant

CORRECT = "correct"
CORPUS_LIMIT = 64


@dataclass(frozen=True)
class Violation:
    trial: int
    circuit: Circuit
    probe_seed: int
    backend_id: str
    verdict: OracleVerdict
    mutant: MutantSpec | None = None


@dataclass
class MutantStats:
    trials: int = 0
    nondegenerate: int = 0
    detected: int = 0  # non-degenerate trials flagged by an expected oracle
    nonempty: int = 0
    per_oracle_nonempty: dict = field(default_factory=dict)  # oracle -> detections on non-empty circuits

    @property
    def detection_rate(self) -> float:
        return self.detected / self.nondegenerate if self.nondegenerate else float("nan")


@dataclass
class CampaignResult:
    trials_run: int
    seed: int
    violations: list[Violation]
    detection_matrix: dict[tuple[str, str], int]
    mutant_stats: dict[str, MutantStats]
    wall_time: float = 0.0

    @property
    def correct_violations(self) -> list[Violation]:
        return [v for v in self.violations if v.backend_id == CORRECT]

    @property
    def sound(self) -> bool:
        return not self.correct_violations

    def summary(self) -> dict:
        """Deterministic JSON-ready digest (wall time deliberately excluded)."""
        matrix: dict[str, dict[str, int]] = {}
        for (m, o), count in sorted(self.detection_matrix.items()):
            matrix.setdefault(m, {})[o] = count
        return {
            "seed": self.seed,
            "trials_run": self.trials_run,
            "sound": self.sound,
            "correct_violations": len(self.correct_violations),
            "mutant_violations": len(self.violations) - len(self.correct_violations),
            "detection_matrix": matrix,
            "mutants": {
                m: {
                    "trials": s.trials,
                    "nondegenerate": s.nondegenerate,
                    "detected": s.detected,
                    "detection_rate": None if not s.nondegenerate else s.detection_rate,
                }
                for m, s in sorted(self.mutant_stats.items())
            },
        }


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, dtype=np.uint32)[0])


def run_campaign(
    gen: GeneratorConfig,
    mutants: Sequence[MutantSpec] = (),
    oracles_enabled: Iterable[OracleId] = ALL_ORACLES,
    trials: int = 100,
    tol: ToleranceConfig = ToleranceConfig(),
    probes: int = 8,
    granularity: Granularity = WHOLE,
    mutation_rate: float = 0.25,
    on_trial: Callable[[int, Circuit], None] | None = None,
) -> CampaignResult:
    """Blind generation plus corpus mutation; every trial seeds from ``(gen.seed, trial)``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    oracles = [OracleId(o) for o in oracles_enabled]
    start = time.perf_counter()
    corpus: list[Circuit] = []
    violations: list[Violation] = []
    matrix: dict[tuple[str, str], int] = {
        (m.mutant_id.value, o.value): 0 for m in mutants for o in oracles
    }
    stats = {m.mutant_id.value: MutantStats() for m in mutants}

    for trial in range(trials):
        tseed = trial_seed(gen.seed, trial)
        rng = np.random.default_rng(tseed)
        if corpus and rng.random() < mutation_rate:
            circuit = mutate_circuit(corpus[int(rng.integers(len(corpus)))], rng, gen)
        else:
            circuit = generate_circuit(gen, rng)
        if len(corpus) < CORPUS_LIMIT:
            corpus.append(circuit)
        else:
            corpus[int(rng.integers(CORPUS_LIMIT))] = circuit
        if on_trial is not None:
            on_trial(trial, circuit)

        backends: list[tuple[MutantSpec | None, Backend]] = [(None, CorrectBackend())]
        backends += [(m, make_mutant(m, rng)) for m in mutants]
        for spec, backend in backends:
            verdicts = evaluate_circuit(circuit, backend, tol, oracles, granularity, probes, tseed)
            failed = [v for v in verdicts if not v.passed]
            for v in failed:
                violations.append(Violation(trial, circuit, tseed, backend.backend_id if spec else CORRECT, v, spec))
            if spec is None:
                continue
            mid = spec.mutant_id.value
            st = stats[mid]
            st.trials += 1
            failed_ids = {v.oracle_id for v in failed}
            for o in failed_ids:
                matrix[(mid, o.value)] += 1
            if circuit.instructions:
                st.nonempty += 1
                for o in failed_ids:
                    st.per_oracle_nonempty[o.value] = st.per_oracle_nonempty.get(o.value, 0) + 1
            if not is_degenerate(spec, circuit):
                st.nondegenerate += 1
                if failed_ids & set(spec.expected_oracles):
                    st.detected += 1

    return CampaignResult(trials, gen.seed, violations, matrix, stats, time.perf_counter() - start)
