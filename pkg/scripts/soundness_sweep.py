"""Soundness sweep: random circuits on the correct backend at several widths; expects zero violations."""
import argparse
import time

from qoracle.fuzzer import GeneratorConfig, run_campaign
from qoracle.oracles import Granularity


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200, help="trials per width")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-depth", type=int, default=100)
    ap.add_argument("--granularity", default="whole", help="whole | per_gate | fragments(k)")
    args = ap.parse_args()

    granularity = Granularity.parse(args.granularity)
    total = 0
    for n in (1, 2, 4, 6, 8, 10):
        gen = GeneratorConfig(min_qubits=n, max_qubits=n, min_depth=0, max_depth=args.max_depth,
                              angle_distribution="uniform", seed=args.seed + n)
        t0 = time.perf_counter()
        r = run_campaign(gen, trials=args.trials, granularity=granularity)
        total += len(r.violations)
        print(f"n={n:>2}: {len(r.violations)} violation(s) in {args.trials} trials, {time.perf_counter() - t0:.1f}s")
        for v in r.violations[:3]:
            print(f"   trial {v.trial}: {v.verdict.oracle_id.value} {v.verdict.message}")
    raise SystemExit(1 if total else 0)


if __name__ == "__main__":
    main()
