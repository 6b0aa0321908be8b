#!/usr/bin/env python3
"""Simulated-oracle sweep: recover every transitive subgroup of some overgroups.

Prints, per overgroup and strategy, how many groups were recovered, the
total and maximum number of resolvent queries, and the elapsed time.
"""

import argparse
import time

from padicgal.choice import parse_chooser
from padicgal.cli import parse_shape
from padicgal.deduce import STRATEGIES, simulated_run
from padicgal.errors import GaloisError
from padicgal.model import shape_group
from padicgal.stats import parse_statistic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--W", nargs="+", default=["S4", "S2wrS2", "C2wrC3", "S2wrS2wrS2"])
    ap.add_argument("--stat", default="FactorDegrees")
    ap.add_argument("--choose", default="OrbitIndex")
    ap.add_argument("--p", type=int, default=2)
    args = ap.parse_args()
    stat, chooser = parse_statistic(args.stat), parse_chooser(args.choose)
    variants = [("All", {}), ("Maximal", {}), ("Maximal", {"policy": "all"}), ("Maximal2", {})]
    for name in args.W:
        shape = parse_shape(name)
        W = shape_group(shape)
        Gs = [G for G in W.subgroup_classes() if G.is_transitive()]
        for kind, kw in variants:
            t0 = time.time()
            ok, queries = 0, []
            for G in Gs:
                try:
                    H, q = simulated_run(STRATEGIES[kind](stat, chooser, **kw), W, G, shape, args.p)
                except GaloisError:
                    continue
                ok += W.is_conjugate(G, H)
                queries.append(q)
            label = kind + ("(all)" if kw else "")
            print(f"{name:12} {label:13} recovered {ok}/{len(Gs)}  queries total {sum(queries):4} "
                  f"max {max(queries, default=0):3}  {time.time() - t0:6.1f}s", flush=True)


if __name__ == "__main__":
    main()
