#!/usr/bin/env python3
"""Write a JSONL job file for ``padicgal batch``.

Jobs cover Eisenstein polynomials of one degree over Q_p with small
coefficients, e.g.::

    python3 scripts/make_batch.py --degree 4 --p 2 > quartics.jsonl
    padicgal batch quartics.jsonl --summary
"""

import argparse
import itertools
import json


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--degree", type=int, default=4)
    ap.add_argument("--p", type=int, default=2)
    ap.add_argument("--params", default="A2")
    ap.add_argument("--limit", type=int, default=50)
    args = ap.parse_args()
    p, d = args.p, args.degree
    # constant term p*u with u a unit, other coefficients in {0, p}
    consts = [p * u for u in range(1, p * p) if u % p]
    count = 0
    for c0 in consts:
        for mid in itertools.product((0, p), repeat=d - 1):
            if count >= args.limit:
                return
            print(json.dumps({"p": p, "poly": [c0, *mid, 1], "params": args.params}))
            count += 1


if __name__ == "__main__":
    main()
