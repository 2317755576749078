"""Measure closure size and runtime across generated chain KBs.

For each requested size the script builds a chain KB, materializes its
closure, and records the number of derived atoms and the wall time.
It then reports log-log slopes for both series; values at or below 2
indicate the quadratic envelope expected of the translation.
"""
from __future__ import annotations

import argparse
import time

from typel._families import chain_kb, fit_loglog_slope
from typel.datalog import evaluate
from typel.materialize import build_program, translate
from typel.normalize import normalize


def measure(n: int) -> tuple[int, float]:
    kb = chain_kb(n)
    nkb, _ = normalize(kb, (), mode="general")
    program = build_program(translate(nkb))
    t0 = time.perf_counter()
    store = evaluate(program)
    return len(store), time.perf_counter() - t0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--sizes",
        type=int,
        nargs="+",
        default=[10, 20, 40, 80],
        help="chain sizes to measure (default: 10 20 40 80)",
    )
    ap.add_argument(
        "--repeats",
        type=int,
        default=3,
        help="timing repeats per size; the minimum is kept (default: 3)",
    )
    args = ap.parse_args()
    if any(n < 4 for n in args.sizes):
        ap.error("sizes must be at least 4")

    atoms: list[float] = []
    secs: list[float] = []
    print(f"{'n':>6} {'atoms':>10} {'seconds':>10}")
    for n in args.sizes:
        count, best = 0, float("inf")
        for _ in range(max(1, args.repeats)):
            count, dt = measure(n)
            best = min(best, dt)
        atoms.append(float(count))
        secs.append(best)
        print(f"{n:>6} {count:>10} {best:>10.4f}")

    print(f"atom slope: {fit_loglog_slope(args.sizes, atoms):.3f}")
    print(f"time slope: {fit_loglog_slope(args.sizes, secs):.3f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
