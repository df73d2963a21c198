#!/usr/bin/env python3
"""Long-running randomized verification campaign.

Same suites as `stickygas fuzz` (conservation, variational equivalence,
conditional-expectation identities, optional time-stepped oracle) with a
progress line; failures are echoed as self-contained instance documents.
"""

import argparse
import sys

import numpy as np

from stickygas.instances import instance_document, random_instance
from stickygas.verify import run_instance_suites


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--n-max", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--with-oracle", action="store_true")
    args = ap.parse_args()

    failures = 0
    for k in range(args.count):
        rng = np.random.default_rng(args.seed + k)
        data = random_instance(rng, args.n_max)
        for result in run_instance_suites(data, rng, with_oracle=args.with_oracle):
            if not result.passed:
                failures += 1
                print(f"\nFAIL seed={args.seed + k} {result.name}: {result.detail}")
                print(instance_document(data, seed=args.seed + k))
        if (k + 1) % 100 == 0:
            print(f"{k + 1}/{args.count} instances, {failures} failures", flush=True)
    print(f"done: {args.count} instances, {failures} failures")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
