#!/usr/bin/env python3
"""Random Eisenstein octics over Q_2: compare parameterizations, seeds and precision.

Each polynomial is solved four ways (A0, B2, A0 with another seed, A0 at
doubled precision); the answers must agree up to conjugacy in S_8.
"""

import argparse
import random
import time

from padicgal import perm as P
from padicgal.engine import galois_group


def eisenstein(rng, degree):
    c0 = 2 * rng.choice([-1, 1]) * (2 * rng.randint(0, 2) + 1)
    return [c0] + [2 * rng.randint(-2, 2) for _ in range(degree - 1)] + [1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=10)
    ap.add_argument("--degree", type=int, default=8)
    ap.add_argument("--seed", type=int, default=20261018)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    Sd = P.symmetric_group(args.degree)
    runs = [("A0", 0, 1.0), ("B2", 0, 1.0), ("A0", 1, 1.0), ("A0", 0, 2.0)]
    disagreements = 0
    for i in range(args.count):
        F = eisenstein(rng, args.degree)
        out = []
        for params, seed, scale in runs:
            t = time.time()
            G = galois_group(F, 2, params, seed=seed, precision_scale=scale).group
            out.append((G, time.time() - t))
        agree = all(Sd.is_conjugate(out[0][0], G) for G, _ in out[1:])
        disagreements += not agree
        times = ", ".join(f"{t:.1f}s" for _, t in out)
        print(f"{i:2} {F}  order {out[0][0].order():5}  agree {agree}  ({times})", flush=True)
    print(f"{disagreements} disagreements in {args.count} polynomials")


if __name__ == "__main__":
    main()
