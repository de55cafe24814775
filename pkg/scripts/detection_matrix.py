"""Run a mutant campaign and print detection rates per mutant and oracle."""
import argparse
import json

from qoracle.fuzzer import ALL_MUTANTS, GeneratorConfig, run_campaign
from qoracle.oracles import ALL_ORACLES


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-qubits", type=int, default=6)
    ap.add_argument("--max-depth", type=int, default=30)
    ap.add_argument("--json", help="also dump the campaign summary here")
    args = ap.parse_args()

    gen = GeneratorConfig(max_qubits=args.max_qubits, max_depth=args.max_depth, seed=args.seed)
    result = run_campaign(gen, ALL_MUTANTS, trials=args.trials)
    summary = result.summary()
    cols = [o.value for o in ALL_ORACLES]
    print(f"{'mutant':<12}" + "".join(f"{c:>15}" for c in cols) + f"{'rate':>10}")
    for m, row in summary["detection_matrix"].items():
        st = summary["mutants"][m]
        rate = st["detection_rate"]
        cells = "".join(f"{row.get(c, 0):>15}" for c in cols)
        print(f"{m:<12}{cells}{'n/a' if rate is None else f'{rate:.1%}':>10}")
    print(f"correct backend violations: {summary['correct_violations']}  ({result.wall_time:.1f}s)")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
