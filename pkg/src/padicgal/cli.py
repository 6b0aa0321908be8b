"""Command-line interface: ``compute``, ``batch`` and ``oracle``.

Coefficient lists are ascending (constant term first).  Exit codes: 0 on
success, 1 when a computation fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from . import perm as P
from .choice import parse_chooser
from .deduce import STRATEGIES
from .engine import ResolventLeg, galois_group, parse_params, simulated_run
from .errors import ChooserExhausted, GaloisError, InputError
from .model import shape_group
from .stats import parse_statistic

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


# ----------------------------------------------------------------- parsing

def parse_poly(text: str) -> list:
    """``"[-2,0,1]"`` (ascending, integers or ``"a/b"`` strings) or ``"x^2-2"``."""
    t = text.strip()
    if t.startswith("["):
        try:
            raw = json.loads(t)
        except json.JSONDecodeError as exc:
            raise InputError(f"bad coefficient list: {exc}") from None
        if not isinstance(raw, list) or not raw:
            raise InputError("coefficient list must be a non-empty JSON array")
        out = []
        for c in raw:
            if isinstance(c, bool) or not isinstance(c, (int, str)):
                raise InputError(f"bad coefficient {c!r}")
            try:
                f = Fraction(c)
            except ValueError:
                raise InputError(f"bad coefficient {c!r}") from None
            out.append(int(f) if f.denominator == 1 else f)
        return out
    if not re.fullmatch(r"[0-9x^*+\-/() ]+", t):
        raise InputError(f"cannot parse polynomial {text!r}")
    from ._pari import pari
    try:
        vec = pari(f"Vecrev({t})")
    except Exception as exc:
        raise InputError(f"cannot parse polynomial {text!r}: {exc}") from None
    out = [Fraction(str(c)) for c in vec]
    return [int(c) if c.denominator == 1 else c for c in out]


def _coeff_json(c):
    return c if isinstance(c, int) else str(c)


def parse_shape(text: str):
    """Overgroup shapes such as ``S4``, ``C2wrC3`` (C2 inside C3) or ``S2xS3``."""
    t = text.strip()
    if "x" in t:
        return ("direct", [parse_shape(s) for s in t.split("x")])
    if "wr" in t:
        inner_first = t.split("wr")
        return ("wreath", [parse_shape(s) for s in reversed(inner_first)])
    m = re.fullmatch(r"([SC])(\d+)", t)
    if not m or int(m.group(2)) < 1:
        raise InputError(f"cannot parse overgroup {text!r}")
    d = int(m.group(2))
    return ("sym", d) if m.group(1) == "S" else ("group", P.cyclic_group(d))


def parse_strategy(text: str, stat: str | None = None):
    """A strategy from a parameterization (its first resolvent leg) or ``D[S,C]``."""
    t = text.strip()
    m = re.fullmatch(r"(\w+)\[(.*),([^,\[\]]+(?:\[[^\]]*\])?)\]", t)
    if m and m.group(1) in STRATEGIES:
        leg = ResolventLeg(None, m.group(1), parse_statistic(m.group(2)), parse_chooser(m.group(3)))
    else:
        legs = [l for l in parse_params(t).legs if isinstance(l, ResolventLeg)]
        if not legs:
            raise InputError(f"{text!r} has no resolvent leg")
        leg = legs[0]
    s = parse_statistic(stat) if stat else leg.stat
    return STRATEGIES[leg.strategy](s, leg.chooser)


# ------------------------------------------------------------------- jobs

def run_job(job: dict) -> dict:
    """Compute one JobRecord; failures are recorded rather than raised."""
    rec = dict(job)
    t0 = time.time()
    try:
        if not isinstance(job, dict) or "p" not in job or "poly" not in job:
            raise InputError("a job needs 'p' and 'poly'")
        poly = job["poly"]
        poly = parse_poly(json.dumps(poly) if isinstance(poly, list) else str(poly))
        res = galois_group(poly, int(job["p"]), job.get("params", "A0"), int(job.get("seed", 0)))
    except (GaloisError, ValueError, TypeError) as exc:
        rec["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return rec
    out = res.to_json()
    rec["result"] = {
        "group": out["generators"],
        "order": out["order"],
        "orbit_sizes": list(res.group.orbit_sizes()),
        "algorithm": out["algorithm"],
        "resolvent_degrees": res.certificate.get("resolvent_degrees", {}),
        "queries": res.certificate.get("queries", 0),
        "seconds": round(time.time() - t0, 3),
    }
    return rec


# --------------------------------------------------------------- commands

def cmd_compute(args) -> int:
    poly = parse_poly(args.poly)
    log_line = (lambda s: print(s, file=sys.stderr)) if args.verbose else None
    try:
        res = galois_group(poly, args.p, args.params, seed=args.seed, log_line=log_line)
    except GaloisError as exc:
        if isinstance(exc, InputError):
            raise
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.json:
        rec = {"p": args.p, "poly": [_coeff_json(c) for c in poly], "params": args.params,
               "seed": args.seed, "result": res.to_json()}
        if not args.dump_model:
            rec["result"]["certificate"].pop("model", None)
        print(json.dumps(rec))
        return EXIT_OK
    cert = res.certificate
    print(f"group: {res.group.format()}")
    print(f"order: {res.order}")
    print(f"orbit sizes: {list(res.group.orbit_sizes())}")
    print(f"algorithm: {res.algorithm} ({res.params})")
    if "queries" in cert:
        print(f"resolvents: {cert['queries']} by degree {cert['resolvent_degrees']}")
    if args.dump_model and "model" in cert:
        print(json.dumps(cert["model"], indent=2))
    return EXIT_OK


def cmd_batch(args) -> int:
    try:
        with open(args.file) as fh:
            lines = [l for l in fh.read().splitlines() if l.strip()]
    except OSError as exc:
        raise InputError(f"cannot read {args.file}: {exc}") from None
    jobs = []
    for i, line in enumerate(lines):
        try:
            jobs.append(json.loads(line))
        except json.JSONDecodeError as exc:
            jobs.append({"line": i + 1, "raw": line, "_bad": f"malformed JSON: {exc}"})
    def one(job):
        if "_bad" in job:
            bad = job.pop("_bad")
            return {**job, "error": {"type": "InputError", "message": bad}}
        return run_job(job)
    if args.jobs > 1 and len(jobs) > 1:
        ok = [j for j in jobs if "_bad" not in j]
        with ProcessPoolExecutor(args.jobs) as pool:
            done = iter(list(pool.map(run_job, ok)))
        records = [one(j) if "_bad" in j else next(done) for j in jobs]
    else:
        records = [one(j) for j in jobs]
    for r in records:
        print(json.dumps(r))
    if args.summary:
        orders = Counter(r["result"]["order"] for r in records if "result" in r)
        summary = {"total": len(records), "errors": sum("error" in r for r in records),
                   "orders": {str(k): v for k, v in sorted(orders.items())}}
        print("summary: " + json.dumps(summary), file=sys.stderr)
    return EXIT_FAIL if any("error" in r for r in records) else EXIT_OK


def cmd_oracle(args) -> int:
    shape = parse_shape(args.W)
    W = shape_group(shape)
    strategy = parse_strategy(args.params, args.stat)
    Gs = [G for G in W.subgroup_classes() if G.is_transitive() or not args.transitive]
    recovered = 0
    for G in Gs:
        t0 = time.time()
        try:
            ans, queries = simulated_run(strategy, W, G, shape, p=args.p)
            ok = ans.order() == G.order() and W.is_conjugate(ans, G)
            note = "" if ok else f"answer order {ans.order()}"
        except ChooserExhausted as exc:
            ok, queries, note = False, exc.state.queries if exc.state else 0, "chooser exhausted"
        except GaloisError as exc:
            ok, queries, note = False, 0, f"{type(exc).__name__}: {exc}"
        recovered += ok
        print(f"{'ok  ' if ok else 'FAIL'} order {G.order():>5}  queries {queries:>3}  "
              f"{time.time() - t0:6.2f}s  {G.format()}  {note}".rstrip())
    print(f"recovered {recovered}/{len(Gs)} with {strategy.format()} in {args.W}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="padicgal", description="Galois groups of p-adic polynomials.")
    ap.add_argument("--verbose", "-v", action="store_true", help="log the deduction trace")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    c = sub.add_parser("compute", help="one polynomial")
    c.add_argument("--p", type=int, required=True)
    c.add_argument("--poly", required=True, help='ascending coefficients "[-2,0,1]" or "x^2-2"')
    c.add_argument("--params", default="A0")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--json", action="store_true")
    c.add_argument("--dump-model", action="store_true")
    c.add_argument("--verbose", "-v", action="store_true", default=argparse.SUPPRESS)

    b = sub.add_parser("batch", help="newline-delimited JSON jobs")
    b.add_argument("file")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--summary", action="store_true", help="print a group-order histogram")

    o = sub.add_parser("oracle", help="simulated sweep over subgroups of an overgroup")
    o.add_argument("--W", required=True, help="e.g. S4, S2wrS2, C2wrC3, S2xS3")
    o.add_argument("--params", default="A2")
    o.add_argument("--stat", default=None, help="override the statistic, e.g. Degree")
    o.add_argument("--p", type=int, default=2)
    o.add_argument("--all-subgroups", dest="transitive", action="store_false",
                   help="also sweep intransitive subgroups")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"compute": cmd_compute, "batch": cmd_batch, "oracle": cmd_oracle}[args.cmd]
    try:
        return handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
