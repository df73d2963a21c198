#!/usr/bin/env python3
"""Reproduce the two-parabola crossing regimes for colliding pairs.

For a two-particle instance the post-shock interval inequality reduces to
comparing the two free-flight parabolas.  With the left acceleration below
the right one they cross twice and the inequality dies at the second
crossing; with the ordering reversed there is a single crossing and the
inequality holds forever after.  Writes one CSV per regime with the
crossing times and a dominance grid, ready for plotting.
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from stickygas.quadratics import QuadraticPath, quadratic_meet_times


def sample_pair(rng, increasing: bool):
    dx = rng.uniform(0.1, 2.0)
    dth = rng.uniform(0.1, 2.0)
    # approach fast enough to guarantee the first crossing
    dv = -np.sqrt(2.0 * dx * dth) * (1.0 + rng.uniform(0.05, 2.0))
    th1 = rng.normal()
    th2 = th1 + dth if increasing else th1 - dth
    v2 = rng.normal()
    v1 = v2 - dv
    x1 = rng.normal()
    x2 = x1 + dx
    return QuadraticPath(x1, v1, th1), QuadraticPath(x2, v2, th2)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", type=Path, default=Path("two_parabola_out"))
    args = ap.parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    for regime, increasing in (("two_crossings", True), ("one_crossing", False)):
        rows = []
        for k in range(args.count):
            left, right = sample_pair(rng, increasing)
            roots = quadratic_meet_times(left, right, 0.0)
            ts = [r.time for r in roots]
            if increasing:
                t1, t2 = ts
                mid = 0.5 * (t1 + t2)
                rows.append([k, t1, t2,
                             left(mid) > right(mid),        # dominance between crossings
                             left(t2 + 1.0) < right(t2 + 1.0)])  # and its failure beyond
            else:
                (t1,) = ts
                grid = np.linspace(t1 * 1.001, 1000.0 * t1, 64)
                holds = all(left(s) > right(s) for s in grid)
                rows.append([k, t1, "", holds, ""])
        path = args.out_dir / f"{regime}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["pair", "t1", "t2", "dominates_between", "fails_after_t2"]
                       if increasing else
                       ["pair", "t1", "t2", "dominates_after", "unused"])
            w.writerows(rows)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
