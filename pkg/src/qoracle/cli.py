"""Command-line entry point: ``qoracle check | fuzz | shrink | mutants list``."""
from __future__ import annotations

import argparse
import logging
import os
import secrets
import sys
from pathlib import Path

from .circuit import STANDARD_GATES
from .fuzzer import ALL_MUTANTS, CATALOG, GeneratorConfig, MutantSpec, ShrinkError, run_campaign, shrink
from .fuzzer.corpus import ENV_CORPUS, default_corpus_dir, failure_predicate, load_failure, write_failures
from .fuzzer.mutants import MutantId, make_mutant
from .oracles import ALL_ORACLES, Granularity, OracleId, OracleVerdict, ToleranceConfig, default_ensemble, evaluate_circuit
from .qasm import QasmError, emit_qasm, load_qasm
from .report import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, Report

log = logging.getLogger("qoracle")


class UsageError(Exception):
    pass


def _add_tolerances(p: argparse.ArgumentParser) -> None:
    d = ToleranceConfig()
    g = p.add_argument_group("tolerances")
    g.add_argument("--eps-prob", type=float, default=d.epsilon_prob)
    g.add_argument("--eps-sum", type=float, default=d.epsilon_sum)
    g.add_argument("--eps-fidelity", type=float, default=d.epsilon_fidelity)
    g.add_argument("--eps-entropy", type=float, default=d.epsilon_entropy)
    g.add_argument("--fingerprint-grid", type=float, default=d.fingerprint_grid)


def _add_oracle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--oracle", action="append", choices=[o.value.lower() for o in OracleId],
                   help="enable only these oracles (repeatable; default: all four)")
    p.add_argument("--granularity", default="whole", choices=["whole", "per_gate", "fragments"])
    p.add_argument("--fragments", type=int, default=5, help="fragment count for --granularity fragments")
    p.add_argument("--probes", type=int, default=8, help="random probe states per reversibility unit")
    p.add_argument("--seed", type=int, default=None, help="master seed (random and logged when omitted)")
    p.add_argument("--json", metavar="PATH", help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qoracle", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run the oracles on one .qasm file against the correct backend")
    check.add_argument("path")
    check.add_argument("--post-measurement", action="store_true",
                       help="entropy oracle compares outcome distributions (decrease allowed)")
    _add_oracle_flags(check)
    _add_tolerances(check)

    fuzz = sub.add_parser("fuzz", help="random circuits against the correct backend and mutants")
    fuzz.add_argument("--trials", type=int, default=100)
    fuzz.add_argument("--min-qubits", type=int, default=1)
    fuzz.add_argument("--max-qubits", type=int, default=6)
    fuzz.add_argument("--min-depth", type=int, default=1)
    fuzz.add_argument("--max-depth", type=int, default=30)
    fuzz.add_argument("--angles", default="pi4", choices=["pi4", "uniform"])
    fuzz.add_argument("--gates", default=",".join(STANDARD_GATES), help="comma-separated gate alphabet")
    fuzz.add_argument("--mutation-rate", type=float, default=0.25)
    fuzz.add_argument("--mutants", default="none", help="comma-separated catalog ids, 'all', or 'none'")
    fuzz.add_argument("--expect-detections", action="store_true",
                      help="exit 1 unless every listed mutant was caught by an expected oracle")
    fuzz.add_argument("--corpus", help=f"write reproducers here (default: ${ENV_CORPUS} if set)")
    _add_oracle_flags(fuzz)
    _add_tolerances(fuzz)

    shr = sub.add_parser("shrink", help="minimize a saved failure in place")
    shr.add_argument("failure_id")
    shr.add_argument("--corpus", help=f"corpus directory (default: ${ENV_CORPUS} or ./qoracle-corpus)")
    shr.add_argument("--json", metavar="PATH")

    mut = sub.add_parser("mutants", help="inspect the mutant catalog")
    mut.add_argument("action", choices=["list"])
    return parser


def _tolerances(args) -> ToleranceConfig:
    try:
        return ToleranceConfig(args.eps_prob, args.eps_sum, args.eps_fidelity, args.eps_entropy, args.fingerprint_grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _oracles(args) -> list[OracleId]:
    return [OracleId(o.upper()) for o in args.oracle] if args.oracle else list(ALL_ORACLES)


def _granularity(args) -> Granularity:
    try:
        return Granularity(args.granularity, args.fragments)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _seed(args) -> int:
    if args.seed is None:
        args.seed = secrets.randbelow(2**32)
        log.warning("no --seed given; using seed=%d", args.seed)
    return args.seed


def _verdict_line(v: OracleVerdict) -> str:
    status = "PASS" if v.passed else "FAIL"
    return f"{status} {v.oracle_id.value:<13} @{str(v.location):<9} {v.message}"


def _parse_mutants(text: str) -> list[MutantSpec]:
    text = text.strip().lower()
    if text in ("", "none"):
        return []
    if text == "all":
        return list(ALL_MUTANTS)
    try:
        return [MutantSpec(MutantId.parse(t)) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_check(args) -> Report:
    tol = _tolerances(args)
    oracles = _oracles(args)
    granularity = _granularity(args)
    seed = _seed(args)
    if args.probes < 1:
        raise UsageError("--probes must be >= 1")
    try:
        circuit = load_qasm(args.path)
    except OSError as exc:
        raise UsageError(f"{args.path}: {exc.strerror or exc}") from None
    except QasmError as exc:
        raise UsageError(f"{args.path}:{exc.line}:{exc.column}: {exc.message}") from None
    ensemble = default_ensemble(circuit.num_qubits, post_measurement=args.post_measurement)
    verdicts = evaluate_circuit(circuit, None, tol, oracles, granularity, args.probes, seed, ensemble)
    failed = sum(not v.passed for v in verdicts)
    print(f"{args.path}: {circuit.num_qubits} qubits, {len(circuit)} instructions, backend=correct")
    for v in verdicts:
        print(_verdict_line(v))
    print(f"{len(verdicts) - failed} passed, {failed} failed")
    invocation = {
        "command": "check",
        "path": str(args.path),
        "oracles": [o.value for o in oracles],
        "granularity": str(granularity),
        "probes": args.probes,
        "seed": seed,
        "post_measurement": args.post_measurement,
        "tolerances": tol.values(),
    }
    return Report(invocation, verdicts, None, EXIT_VIOLATION if failed else EXIT_OK)


def _print_matrix(result, oracles) -> None:
    summary = result.summary()
    if not summary["detection_matrix"]:
        print("detection matrix: (no mutants)")
        return
    cols = [o.value for o in oracles]
    print(f"{'mutant':<12} " + " ".join(f"{c[:13]:>13}" for c in cols) + f" {'caught/nondeg':>14}")
    for m, row in summary["detection_matrix"].items():
        st = summary["mutants"][m]
        cells = " ".join(f"{row.get(c, 0):>13}" for c in cols)
        print(f"{m:<12} {cells} {st['detected']:>7}/{st['nondegenerate']:<6}")


def cmd_fuzz(args) -> Report:
    tol = _tolerances(args)
    oracles = _oracles(args)
    granularity = _granularity(args)
    seed = _seed(args)
    mutants = _parse_mutants(args.mutants)
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    if args.probes < 1:
        raise UsageError("--probes must be >= 1")
    if not 0 <= args.mutation_rate <= 1:
        raise UsageError("--mutation-rate must be in [0, 1]")
    gates = [g.strip() for g in args.gates.split(",") if g.strip()]
    try:
        gen = GeneratorConfig(args.min_qubits, args.max_qubits, args.min_depth, args.max_depth,
                              {g: 1.0 for g in gates}, args.angles, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    result = run_campaign(gen, mutants, oracles, args.trials, tol, args.probes, granularity, args.mutation_rate)
    correct = result.correct_violations
    print(f"{result.trials_run} trials, seed={seed}, {result.wall_time:.1f}s")
    print(f"correct backend: {len(correct)} violation(s)")
    for v in correct:
        print("  trial", v.trial, _verdict_line(v.verdict))
    _print_matrix(result, oracles)

    corpus = args.corpus or (str(default_corpus_dir()) if ENV_CORPUS in os.environ else None)
    if corpus:
        written = write_failures(result, Path(corpus), tol, args.probes, granularity)
        print(f"wrote {len(written)} failure reproducer(s) to {Path(corpus) / 'failures'}")

    status = EXIT_OK if result.sound else EXIT_VIOLATION
    if args.expect_detections:
        missed = [m for m, st in result.mutant_stats.items() if st.detected == 0]
        if missed:
            print("expected detections missing for: " + ", ".join(missed))
            status = EXIT_VIOLATION
    invocation = {
        "command": "fuzz",
        "seed": seed,
        "trials": args.trials,
        "generator": {
            "min_qubits": gen.min_qubits, "max_qubits": gen.max_qubits,
            "min_depth": gen.min_depth, "max_depth": gen.max_depth,
            "angle_distribution": gen.angle_distribution, "gates": gates,
            "mutation_rate": args.mutation_rate,
        },
        "mutants": [m.to_dict() for m in mutants],
        "oracles": [o.value for o in oracles],
        "granularity": str(granularity),
        "probes": args.probes,
        "expect_detections": args.expect_detections,
        "tolerances": tol.values(),
    }
    return Report(invocation, [v.verdict for v in correct], result.summary(), status)


def cmd_shrink(args) -> Report:
    root = Path(args.corpus) if args.corpus else default_corpus_dir()
    try:
        circuit, meta = load_failure(root, args.failure_id)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    except QasmError as exc:
        raise UsageError(f"{args.failure_id}.qasm:{exc.line}:{exc.column}: {exc.message}") from None
    fails = failure_predicate(meta)
    try:
        small = shrink(circuit, fails)
    except ShrinkError:
        raise UsageError(f"failure {args.failure_id} no longer reproduces (stale metadata)") from None
    qasm_path = root / "failures" / f"{args.failure_id}.qasm"
    if len(small) < len(circuit) or emit_qasm(small) != emit_qasm(circuit):
        qasm_path.write_text(emit_qasm(small), encoding="utf-8")
    spec = MutantSpec.from_dict(meta["mutant"]) if meta.get("mutant") else None
    backend = make_mutant(spec) if spec else None
    tol = ToleranceConfig(**meta["tolerances"])
    (verdict,) = evaluate_circuit(small, backend, tol, [OracleId(meta["oracle_id"])],
                                  Granularity.parse(meta["granularity"]), int(meta["probes"]), int(meta["seed"]))
    print(f"{args.failure_id}: {len(circuit)} -> {len(small)} instructions ({meta['mutant_id']}, {meta['oracle_id']})")
    print(_verdict_line(verdict))
    invocation = {"command": "shrink", "failure_id": args.failure_id}
    campaign = {"shrink": {"failure_id": args.failure_id, "before": len(circuit), "after": len(small),
                           "mutant_id": meta["mutant_id"], "oracle_id": meta["oracle_id"]}}
    return Report(invocation, [verdict], campaign, EXIT_OK)


def cmd_mutants(args) -> Report:
    for mid, entry in CATALOG.items():
        expected = ", ".join(o.value for o in entry.expected)
        print(f"{mid.value:<12} -> {expected:<28} {entry.description}  {dict(entry.defaults)}")
    return Report({"command": "mutants list"})


COMMANDS = {"check": cmd_check, "fuzz": cmd_fuzz, "shrink": cmd_shrink, "mutants": cmd_mutants}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        report = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"qoracle {args.command}: error: {exc}", file=sys.stderr)
        report = Report({"command": args.command, "error": str(exc)}, exit_status=EXIT_USAGE)
    json_path = getattr(args, "json", None)
    if json_path:
        try:
            report.write(json_path)
        except OSError as exc:
            print(f"qoracle: cannot write {json_path}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    return report.exit_status


if __name__ == "__main__":
    sys.exit(main())
