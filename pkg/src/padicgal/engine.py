"""Top level: parameterizations, the tame shortcut and the resolvent method.

Parameterization grammar::

    params   := NAME | Seq[leg, ...] | leg
    leg      := Tame
              | ResolventMethod[Global[model], strategy[stat, chooser]]
              | ARM[model=model, deduce=strategy, stat=stat, choose=chooser]
    model    := Sym | Factors[model] | RamTower[model]
              | Select[RootOfUnity, RootOfUniformizer, Sym]
    strategy := All | Maximal | Maximal2
    chooser  := All | Index | OrbitIndex | OrbitIndex[val<=k]

``NAME`` is one of the shorthands ``A0 B0 A1 B1 A2 B2 00``.
"""

from __future__ import annotations

import logging
import math
import os
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import perm as P
from .choice import Chooser, orbit_partition, parse_chooser
from .deduce import STRATEGIES, Evaluator, Strategy, run, simulated_run  # noqa: F401
from .errors import (ChooserExhausted, GaloisError, Inconsistent, InputError, NotApplicable,
                     PrecisionError, ResourceCapExceeded)
from .model import ModelSpec, SELECT, SYM, build_model
from .padic import (LocalField, count_roots, factor_fields, factor_padic, is_squarefree,
                    monic_integral)
from .resolvent import resolvent
from .stats import FactorDegrees, NumAuts, Statistic, parse_statistic

log = logging.getLogger(__name__)

DEGREE_CAP = int(os.environ.get("GALOIS_DEGREE_CAP", 16))


# ------------------------------------------------------------------- parsing

@dataclass(frozen=True)
class Node:
    name: str
    args: tuple = ()          # of Node
    key: str | None = None    # for key=value arguments


class _Parser:
    def __init__(self, text: str):
        self.t = text
        self.i = 0

    def error(self, msg: str):
        raise InputError(f"{msg} at position {self.i} in {self.t!r}")

    def ws(self):
        while self.i < len(self.t) and self.t[self.i].isspace():
            self.i += 1

    def ident(self) -> str:
        self.ws()
        j = self.i
        while j < len(self.t) and (self.t[j].isalnum() or self.t[j] == "_"):
            j += 1
        if j == self.i:
            self.error("expected a name")
        word, self.i = self.t[self.i:j], j
        return word

    def peek(self, s: str) -> bool:
        self.ws()
        return self.t.startswith(s, self.i)

    def term(self) -> Node:
        name = self.ident()
        if self.peek("<="):
            self.i += 2
            return Node(name + "<=" + self.ident())
        args = []
        if self.peek("["):
            self.i += 1
            while True:
                args.append(self.arg())
                if self.peek(","):
                    self.i += 1
                    continue
                if self.peek("]"):
                    self.i += 1
                    break
                self.error("expected ',' or ']'")
        return Node(name, tuple(args))

    def arg(self) -> Node:
        start = self.i
        name = self.ident()
        if self.peek("=") and not self.peek("=="):
            self.i += 1
            val = self.term()
            return Node(val.name, val.args, key=name)
        self.i = start
        return self.term()

    def parse(self) -> Node:
        n = self.term()
        self.ws()
        if self.i != len(self.t):
            self.error("unexpected text")
        return n


def _node_text(n: Node) -> str:
    body = n.name + ("[" + ",".join(_node_text(a) for a in n.args) + "]" if n.args else "")
    return body


def parse_model(n: Node | str) -> ModelSpec:
    if isinstance(n, str):
        n = _Parser(n).parse()
    if n.name in ("Sym", "Symmetric") and not n.args:
        return SYM
    if n.name == "Global" and len(n.args) == 1:
        return parse_model(n.args[0])
    if n.name in ("Factors", "RamTower") and len(n.args) == 1:
        return ModelSpec(n.name, parse_model(n.args[0]))
    if n.name == "Select":
        opts = tuple("Sym" if a.name == "Symmetric" else a.name for a in n.args) or SELECT.options
        bad = [o for o in opts if o not in SELECT.options]
        if bad:
            raise InputError(f"unknown Select option {bad[0]!r}")
        return ModelSpec("Select", options=opts)
    raise InputError(f"unknown global model {_node_text(n)!r}")


@dataclass(frozen=True)
class TameLeg:
    def format(self) -> str:
        return "Tame"


@dataclass(frozen=True)
class ResolventLeg:
    model: ModelSpec
    strategy: str
    stat: Statistic
    chooser: Chooser

    def format(self) -> str:
        return (f"ResolventMethod[Global[{self.model.format()}],"
                f"{self.strategy}[{self.stat.format()},{self.chooser.format()}]]")

    def make_strategy(self) -> Strategy:
        return STRATEGIES[self.strategy](self.stat, self.chooser)


@dataclass(frozen=True)
class Parameterization:
    legs: tuple
    name: str | None = None

    def format(self) -> str:
        return "Seq[" + ",".join(l.format() for l in self.legs) + "]"


_A_MODEL = "Factors[RamTower[Sym]]"
_B_MODEL = "Factors[RamTower[Select[RootOfUnity,RootOfUniformizer,Sym]]]"
SHORTHANDS = {
    "A0": f"Seq[Tame,ResolventMethod[Global[{_A_MODEL}],All[FactorDegrees,Index]]]",
    "B0": f"Seq[Tame,ResolventMethod[Global[{_B_MODEL}],All[FactorDegrees,Index]]]",
    "A1": f"Seq[Tame,ResolventMethod[Global[{_A_MODEL}],All[FactorDegrees,OrbitIndex[val<=1]]]]",
    "B1": f"Seq[Tame,ResolventMethod[Global[{_B_MODEL}],All[FactorDegrees,OrbitIndex[val<=1]]]]",
    "A2": f"Seq[Tame,ResolventMethod[Global[{_A_MODEL}],Maximal2[FactorDegrees,OrbitIndex[val<=1]]]]",
    "B2": f"Seq[Tame,ResolventMethod[Global[{_B_MODEL}],Maximal2[FactorDegrees,OrbitIndex[val<=1]]]]",
    # descent on the HasRoot statistic stands in for the thesis-only RootsMaximal
    "00": "Seq[Tame,ResolventMethod[Global[Factors[Sym]],Maximal[HasRoot,Index]]]",
}


def parse_params(text: str) -> Parameterization:
    t = text.strip()
    if t in SHORTHANDS:
        p = parse_params(SHORTHANDS[t])
        log.info("%s: the SinglyRamified leg of the standard sequence is not implemented", t)
        return Parameterization(p.legs, t)
    n = _Parser(t).parse()
    legs = n.args if n.name == "Seq" else (n,)
    if not legs:
        raise InputError("empty Seq")
    return Parameterization(tuple(_parse_leg(l) for l in legs))


def _parse_leg(n: Node):
    if n.name == "Tame" and not n.args:
        return TameLeg()
    if n.name == "ResolventMethod":
        if len(n.args) != 2:
            raise InputError("ResolventMethod takes a model and a strategy")
        model = parse_model(n.args[0])
        d = n.args[1]
        if d.name not in STRATEGIES or len(d.args) != 2:
            raise InputError(f"bad strategy {_node_text(d)!r}")
        return ResolventLeg(model, d.name, parse_statistic(_node_text(d.args[0])),
                            parse_chooser(_node_text(d.args[1])))
    if n.name == "ARM":
        kw = {a.key: a for a in n.args}
        if None in kw or set(kw) - {"model", "deduce", "stat", "choose"}:
            raise InputError("ARM takes model=, deduce=, stat=, choose=")
        model = parse_model(kw["model"]) if "model" in kw else parse_model(_A_MODEL)
        strategy = kw["deduce"].name if "deduce" in kw else "All"
        if strategy not in STRATEGIES:
            raise InputError(f"unknown strategy {strategy!r}")
        stat = parse_statistic(_node_text(kw["stat"])) if "stat" in kw else FactorDegrees()
        choose = parse_chooser(_node_text(kw["choose"])) if "choose" in kw else Chooser("Index")
        return ResolventLeg(model, strategy, stat, choose)
    if n.name in SHORTHANDS:
        raise InputError(f"shorthand {n.name} cannot be nested")
    raise InputError(f"unknown algorithm {_node_text(n)!r}")


# -------------------------------------------------------------------- result

@dataclass
class GaloisResult:
    group: P.PermGroup
    algorithm: str
    params: str
    certificate: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.group.order()

    def to_json(self) -> dict:
        return {
            "degree": self.group.degree,
            "order": self.order,
            "generators": self.group.format(),
            "transitive": self.group.is_transitive(),
            "algorithm": self.algorithm,
            "params": self.params,
            "certificate": self.certificate,
        }


# ---------------------------------------------------------------------- tame

def _factor_data(F: Sequence[int], p: int) -> list[tuple[list[int], int, int]]:
    """``(poly, e, f)`` for each p-adic irreducible factor."""
    out = []
    for G in factor_fields(F, p):
        if len(G) == 2:
            out.append((G, 1, 1))
            continue
        L = LocalField(G, p)
        out.append((G, L.e, L.f))
    return out


def tame_galois(F: Sequence[int], p: int) -> P.PermGroup:
    """Galois group when every factor is unramified, or ``F`` is irreducible
    and totally tamely ramified; otherwise :class:`NotApplicable`."""
    F = monic_integral(F)
    data = _factor_data(F, p)
    degs = [e * f for _, e, f in data]
    d = sum(degs)
    if all(e == 1 for _, e, _ in data):
        gen, off = list(range(d)), 0
        for k in degs:
            for i in range(k):
                gen[off + i] = off + (i + 1) % k
            off += k
        return P.PermGroup(d, [gen])
    if len(data) == 1:
        _, e, f = data[0]
        if f == 1 and e % p:
            return P.PermGroup(e, [tuple((i + 1) % e for i in range(e)),
                                   tuple(p * i % e for i in range(e))])
    raise NotApplicable("tame shortcut covers unramified and totally tamely ramified fields only")


# --------------------------------------------------------- resolvent method

def _model_orbits(model) -> tuple:
    blocks, k = [], 0
    for T in model.towers:
        blocks.append(tuple(range(k, k + T.degree)))
        k += T.degree
    return tuple(sorted(blocks))


def resolvent_method(F: Sequence[int], p: int, leg: ResolventLeg, seed: int = 0,
                     log_line: Callable[[str], None] | None = None,
                     precision_scale: float = 1.0) -> tuple[P.PermGroup, dict]:
    t0 = time.time()
    model = build_model(F, p, leg.model)
    W = model.W
    strategy = leg.make_strategy()
    degrees: Counter = Counter()
    ev = Evaluator(W, leg.stat)

    def resolve(U):
        reps = ev.action(U).reps()
        R = resolvent(model, U, seed=seed, reps=reps, scale=precision_scale)
        degrees[R.degree] += 1
        v = leg.stat.eval_poly(R.coeffs, p)
        if log_line:
            log_line(f"resolvent degree {R.degree}, invariant {R.invariant.path}, "
                     f"Tschirnhaus #{R.tschirnhaus.counter}, {R.digits} digits")
        return v

    res = run(strategy, W, model.shape, resolve, p, orbits=_model_orbits(model), log=log_line,
              evaluator=ev)
    cert = {
        "model": model.dump(),
        "W_order": W.order(),
        "strategy": strategy.format(),
        "queries": res.state.queries,
        "resolvent_degrees": {str(k): v for k, v in sorted(degrees.items())},
        "trace": [line.format() for line in res.state.trace],
        "seed": seed,
        "seconds": round(time.time() - t0, 3),
    }
    return res.group, cert


# ---------------------------------------------------------------- top level

def _validate(F, p: int) -> list[int]:
    if not isinstance(p, int) or p < 2 or not all(p % q for q in range(2, math.isqrt(p) + 1)):
        raise InputError(f"{p} is not a prime")
    F = list(F)
    while F and F[-1] == 0:
        F.pop()
    if len(F) < 2:
        raise InputError("polynomial must have degree at least 1")
    if not is_squarefree(F):
        raise InputError("polynomial is not squarefree")
    return monic_integral(F)


def galois_group(F: Sequence, p: int, params: str | Parameterization = "A0", seed: int = 0,
                 degree_cap: int | None = None,
                 log_line: Callable[[str], None] | None = None,
                 precision_scale: float = 1.0) -> GaloisResult:
    """Galois group of ``F`` over ``Q_p`` as a permutation group on its roots.

    ``precision_scale`` multiplies the complex working precision of every
    resolvent; results must not depend on it.
    """
    F = _validate(F, p)
    cap = DEGREE_CAP if degree_cap is None else degree_cap
    if len(F) - 1 > cap:
        raise ResourceCapExceeded(f"degree {len(F) - 1} exceeds the cap {cap}")
    prm = parse_params(params) if isinstance(params, str) else params
    failures = []
    for leg in prm.legs:
        try:
            if isinstance(leg, TameLeg):
                G = tame_galois(F, p)
                cert = {"seed": seed}
            else:
                G, cert = resolvent_method(F, p, leg, seed, log_line, precision_scale)
        except NotApplicable as exc:
            failures.append(f"{leg.format()}: {exc}")
            continue
        except (ChooserExhausted, ResourceCapExceeded, PrecisionError) as exc:
            failures.append(f"{leg.format()}: {type(exc).__name__}: {exc}")
            if log_line:
                log_line(failures[-1])
            continue
        _check_result(G, F, p)
        name = "Tame" if isinstance(leg, TameLeg) else "ResolventMethod"
        return GaloisResult(G, name, prm.name or prm.format(), cert)
    raise GaloisError("all algorithms failed: " + "; ".join(failures))


def _check_result(G: P.PermGroup, F: Sequence[int], p: int) -> None:
    degs = tuple(sorted((f.degree for f in factor_padic(F, p)), reverse=True))
    if G.orbit_sizes() != degs:
        raise Inconsistent(f"orbit sizes {G.orbit_sizes()} do not match factor degrees {degs}")
    if G.order() % math.lcm(*degs):
        raise Inconsistent("group order is not divisible by the factor degrees")
    if len(degs) == 1 and degs[0] > 1:
        own = count_roots(F, LocalField(factor_fields(F, p)[0], p))
        if NumAuts().eval_group(G) != own:
            raise Inconsistent(f"group has {NumAuts().eval_group(G)} automorphisms, field has {own}")
