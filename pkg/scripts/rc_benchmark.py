"""Measure rational-closure construction cost across generated chain KBs.

The staged construction runs one evaluation layer per defeasible
inclusion plus a floor and a ceiling stage, so its cost grows with both
the closure size and the number of defaults.  For each requested size
the script reports the default count, the stage at which the rank
assignment stops changing, the wall time, and finally the log-log time
slope across the series.
"""
from __future__ import annotations

import argparse
import time

from typel._families import chain_kb, fit_loglog_slope
from typel.rc import compute_ranks, t_occurrence_count


def measure(n: int) -> tuple[int, int, float]:
    kb = chain_kb(n)
    t0 = time.perf_counter()
    assignment = compute_ranks(kb)
    dt = time.perf_counter() - t0
    return t_occurrence_count(kb), assignment.fixpoint_stage, dt


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        default=[10, 20, 40],
        help="chain sizes to measure (default: 10 20 40; 80 takes ~40s)",
    )
    ap.add_argument(
        "--repeats",
        type=int,
        default=1,
        help="timing repeats per size; the minimum is kept (default: 1)",
    )
    args = ap.parse_args()
    if any(n < 4 for n in args.sizes):
        ap.error("sizes must be at least 4")

    secs: list[float] = []
    print(f"{'n':>6} {'defaults':>9} {'stage':>6} {'seconds':>10}")
    for n in args.sizes:
        occ, stage, best = 0, 0, float("inf")
        for _ in range(max(1, args.repeats)):
            occ, stage, dt = measure(n)
            best = min(best, dt)
        secs.append(best)
        print(f"{n:>6} {occ:>9} {stage:>6} {best:>10.4f}")

    print(f"time slope: {fit_loglog_slope(args.sizes, secs):.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
