#!/usr/bin/env python3
"""Monte-Carlo audit of every stated tail inequality.

For each noise family, estimates the probability of each bounded event
and prints it next to the stated bound (plus the three-sigma binomial
slack used as the pass threshold).  Exits nonzero if any row fails.

    python3 scripts/tail_report.py --samples 100000 --d 4 --n 20
"""

from __future__ import annotations

import argparse

import numpy as np

from shadowlab import KINDS, verify_tails


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--kinds", nargs="+", default=list(KINDS))
    parser.add_argument("--d", type=int, default=4)
    parser.add_argument("--n", type=int, default=20)
    parser.add_argument("--sigma", type=float, default=0.4)
    parser.add_argument("--samples", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    header = (
        f"{'family':>9} {'inequality':>20} {'event':>6} {'t':>6} "
        f"{'empirical':>10} {'bound':>11} {'slack':>9}  verdict"
    )
    print(header)
    print("-" * len(header))
    failures = 0
    for kind in args.kinds:
        report = verify_tails(kind, args.d, args.n, args.sigma, args.samples, rng)
        for row in report["rows"]:
            verdict = "ok" if row["pass"] else "FAIL"
            failures += 0 if row["pass"] else 1
            print(
                f"{kind:>9} {row['name']:>20} {row['event']:>6} {row['t']:>6.2f} "
                f"{row['empirical']:>10.5f} {row['bound']:>11.5g} "
                f"{row['slack']:>9.5f}  {verdict}"
            )
    print(f"\n{failures} failing rows at {args.samples} samples per row")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
