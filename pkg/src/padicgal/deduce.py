"""Deduction strategies: narrowing the Galois group ``G <= W`` from resolvents.

Every strategy keeps a pool of subgroups of ``W`` (up to conjugacy), asks
the chooser for a useful ``U``, obtains the statistic of the resolvent for
``U`` through a callback and updates the pool.  For a candidate ``P`` the
expected value is ``s(q(P))`` where ``q`` is the action of ``W`` on the
cosets ``W/U``.

* ``All``       pool of every possible group; drop those whose value differs.
* ``Maximal``   descend from ``W``; ``P`` is known ``!= G`` on a mismatch and
                dropped when the value cannot come from a subgroup of ``P``.
* ``Maximal2``  descend using maximal preimages, so a mismatch replaces
                ``P`` directly by the few subgroups that could contain ``G``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import perm as P
from .choice import Chooser, orbit_partition, tranches
from .errors import ChooserExhausted, Inconsistent, InputError, ResourceCapExceeded
from .stats import (FactorDegrees, HasRoot, Statistic, count_classes, format_value,
                    maximal_preimages, naive_maximal_preimages)

Resolve = Callable[[P.PermGroup], object]


# ------------------------------------------------------------------ evaluator

class Evaluator:
    """Cached values ``s(q_U(X))`` for subgroups ``X`` of ``W``."""

    def __init__(self, W: P.PermGroup, stat: Statistic):
        self.W, self.stat = W, stat
        self._actions: dict[int, tuple] = {}
        self._values: dict[tuple[int, int], tuple] = {}

    def action(self, U: P.PermGroup) -> P.CosetAction:
        got = self._actions.get(id(U))
        if got is None:
            got = self._actions[id(U)] = (U, self.W.coset_action(U))
        return got[1]

    def image(self, U: P.PermGroup, X: P.PermGroup) -> P.PermGroup:
        return self.action(U).group(X)

    def value(self, U: P.PermGroup, X: P.PermGroup):
        key = (id(U), id(X))
        got = self._values.get(key)
        if got is None:
            got = self._values[key] = (U, X, self.stat.eval_group(self.image(U, X)))
        return got[2]

    def pullback(self, U: P.PermGroup, X: P.PermGroup, Q: P.PermGroup) -> P.PermGroup:
        """``X meet q^-1(Q)`` for a subgroup ``Q`` of ``q(X)``."""
        act = self.action(U)
        rows = X.rows
        imgs = np.empty((len(rows), act.degree), dtype=np.uint8)
        for j, r in enumerate(act.rep_idx):
            comp = rows[:, self.W.rows[r].astype(np.intp)]
            imgs[:, j] = act.labels[self.W.index_of(comp)]
        mask = Q.index_of(imgs) >= 0
        return X._sub_from_mask(mask)

    def preimages(self, U: P.PermGroup, X: P.PermGroup, v) -> list[P.PermGroup]:
        """Subgroups of ``X`` pulled back from the maximal preimages of ``v`` in ``q(X)``."""
        s = self.stat
        m = self.action(U).degree
        if isinstance(s, (FactorDegrees, HasRoot)) and m <= 255:
            qX = self.image(U, X)
            try:
                return [self.pullback(U, X, Q) for Q in maximal_preimages(s, qX, v)]
            except ResourceCapExceeded:
                pass
        return naive_maximal_preimages(s, X, v, value=lambda Y: s.eval_group(self.image(U, Y)))


# --------------------------------------------------------------------- trace

@dataclass
class TraceLine:
    index: int
    orbit_index: tuple
    value: str
    pool_before: int
    pool_after: int
    tranche: str = ""

    def format(self) -> str:
        n, r = self.orbit_index
        return (f"U index {self.index} (orbit index {n}, remaining {r}) [{self.tranche}]: "
                f"s = {self.value}; pool {self.pool_before} -> {self.pool_after}")


# --------------------------------------------------------------- strategies

@dataclass
class Entry:
    group: P.PermGroup
    not_equal: bool = False
    maximals: list = field(default_factory=list)   # maximal subgroups not yet excluded


class Strategy:
    """Common driver; subclasses implement ``start``, ``useful``, ``process``, ``answer``."""
    kind = "?"
    restart_tranches = True

    def __init__(self, stat: Statistic, chooser: Chooser):
        self.stat, self.chooser = stat, chooser

    def format(self) -> str:
        return f"{self.kind}[{self.stat.format()},{self.chooser.format()}]"

    # state ------------------------------------------------------------------
    def start(self, W: P.PermGroup, orbits: tuple) -> list[Entry]:
        raise NotImplementedError

    def useful(self, ev: Evaluator, pool: list[Entry], U: P.PermGroup) -> bool:
        raise NotImplementedError

    def process(self, ev: Evaluator, pool: list[Entry], U, v) -> list[Entry]:
        raise NotImplementedError

    def answer(self, pool: list[Entry]) -> P.PermGroup | None:
        raise NotImplementedError


def _dedupe_entries(W: P.PermGroup, entries: Sequence[Entry]) -> list[Entry]:
    out: list[Entry] = []
    for e in entries:
        if any(f.group.order() == e.group.order() and W.is_conjugate(e.group, f.group) for f in out):
            continue
        out.append(e)
    return out


def _maximals(G: P.PermGroup) -> list[P.PermGroup]:
    return G.maximal_subgroups() if G.order() > 1 else []


class AllStrategy(Strategy):
    kind = "All"
    restart_tranches = False

    def start(self, W, orbits):
        if W.order() > P.TABLE_CAP:
            raise ResourceCapExceeded("All needs the subgroup lattice of W")
        return [Entry(H) for H in W.subgroup_classes() if orbit_partition(H) == orbits]

    def useful(self, ev, pool, U):
        if len(pool) < 2:
            return False
        return count_classes(self.stat, [ev.value(U, e.group) for e in pool]) >= 2

    def process(self, ev, pool, U, v):
        return [e for e in pool if self.stat.equivalent(v, ev.value(U, e.group))]

    def answer(self, pool):
        return pool[0].group if len(pool) == 1 else None


class MaximalStrategy(Strategy):
    """Descent with pool expansion on ``G != P``.

    ``policy="first"`` replaces each ``P`` by its maximal subgroups as soon
    as it is known to differ from ``G``; ``policy="all"`` waits until every
    pool member is known to differ.
    """
    kind = "Maximal"

    def __init__(self, stat, chooser, policy: str = "first"):
        super().__init__(stat, chooser)
        if policy not in ("first", "all"):
            raise InputError(f"unknown Maximal policy {policy!r}")
        self.policy = policy

    def start(self, W, orbits):
        return [Entry(W, maximals=_maximals(W))]

    def useful(self, ev, pool, U):
        s = self.stat
        for e in pool:
            vp = ev.value(U, e.group)
            for Q in e.maximals:
                if not s.precedes(vp, ev.value(U, Q)):
                    return True
        if len(pool) > 1:
            return count_classes(s, [ev.value(U, e.group) for e in pool]) >= 2
        return False

    def process(self, ev, pool, U, v):
        s = self.stat
        out = []
        for e in pool:
            vp = ev.value(U, e.group)
            if not s.precedes(v, vp):
                continue
            ne = e.not_equal or not s.equivalent(v, vp)
            keep = [Q for Q in e.maximals if s.precedes(v, ev.value(U, Q))]
            out.append(Entry(e.group, ne, keep))
        expand = [e.not_equal for e in out]
        if self.policy == "all" and not all(expand):
            expand = [False] * len(out)
        new = []
        for e, x in zip(out, expand):
            if x:
                new += [Entry(Q, maximals=_maximals(Q)) for Q in e.maximals]
            else:
                new.append(e)
        return _dedupe_entries(ev.W, new)

    def answer(self, pool):
        if len(pool) == 1 and not pool[0].maximals:
            if pool[0].not_equal:
                raise Inconsistent("the only candidate was ruled out")
            return pool[0].group
        return None


class Maximal2Strategy(Strategy):
    kind = "Maximal2"

    def start(self, W, orbits):
        return [Entry(W, maximals=_maximals(W))]

    @staticmethod
    def _endgame(pool) -> bool:
        return all(not e.maximals for e in pool)

    def useful(self, ev, pool, U):
        s = self.stat
        if self._endgame(pool):
            return len(pool) > 1 and count_classes(s, [ev.value(U, e.group) for e in pool]) >= 2
        for e in pool:
            vp = ev.value(U, e.group)
            if any(not s.equivalent(vp, ev.value(U, Q)) for Q in e.maximals):
                return True
        return False

    def process(self, ev, pool, U, v):
        s = self.stat
        out: list[Entry] = []
        for e in pool:
            Pg = e.group
            vp = ev.value(U, Pg)
            if s.equivalent(v, vp):
                keep = [Q for Q in e.maximals if s.precedes(v, ev.value(U, Q))]
                out.append(Entry(Pg, e.not_equal, keep))
                continue
            # G != P: G lies in P meet q^-1(Q'') for a maximal preimage Q''
            for X in ev.preimages(U, Pg, v):
                if X.order() == Pg.order():
                    continue
                # subgroups of excluded maximal subgroups cannot contain G
                if not any(Pg.contained_up_to_conjugacy(X, Q) for Q in e.maximals):
                    continue
                out.append(Entry(X, maximals=_maximals(X)))
        return _dedupe_entries(ev.W, out)

    def answer(self, pool):
        if len(pool) == 1 and not pool[0].maximals:
            return pool[0].group
        return None


STRATEGIES = {"All": AllStrategy, "Maximal": MaximalStrategy, "Maximal2": Maximal2Strategy}


# --------------------------------------------------------------------- driver

@dataclass
class DeductionState:
    strategy: str
    pool: list[Entry]
    queries: int = 0
    trace: list[TraceLine] = field(default_factory=list)


@dataclass
class DeductionResult:
    group: P.PermGroup
    state: DeductionState


def run(strategy: Strategy, W: P.PermGroup, shape, resolve: Resolve, p: int,
        state: DeductionState | None = None, orbits: tuple | None = None,
        log: Callable[[str], None] | None = None,
        evaluator: Evaluator | None = None) -> DeductionResult:
    """Run one strategy until it identifies ``G`` (up to ``W``-conjugacy)."""
    if orbits is None:
        orbits = orbit_partition(W)
    ev = evaluator if evaluator is not None else Evaluator(W, strategy.stat)
    if state is None or state.strategy != strategy.kind:
        state = DeductionState(strategy.kind, strategy.start(W, orbits),
                               0 if state is None else state.queries,
                               [] if state is None else state.trace)
    made: list = []
    gen = tranches(W, shape, strategy.chooser, p)

    def tranche(i):
        while len(made) <= i:
            t = next(gen, None)
            if t is None:
                return None
            made.append(t)
        return made[i]

    spent: set[int] = set()
    answers: dict[int, tuple] = {}   # id(U) -> (U, value); each U is resolved once
    ti = 0
    while True:
        if not state.pool:
            raise Inconsistent("candidate pool became empty")
        ans = strategy.answer(state.pool)
        if ans is not None:
            return DeductionResult(ans, state)
        chosen = None
        while chosen is None:
            t = tranche(ti)
            if t is None:
                raise ChooserExhausted(f"{strategy.format()}: no useful subgroup left", state)
            for U in t.groups:
                if id(U) not in spent and strategy.useful(ev, state.pool, U):
                    chosen = (U, t)
                    break
            else:
                ti += 1
        U, t = chosen
        if id(U) not in answers:
            answers[id(U)] = (U, resolve(U))
            state.queries += 1
        v = answers[id(U)][1]
        before = len(state.pool)
        new_pool = strategy.process(ev, state.pool, U, v)
        changed = _signature(new_pool) != _signature(state.pool)
        state.pool = new_pool
        n = W.order() // U.order()
        S = W.partition_stabilizer(orbit_partition(U))
        line = TraceLine(n, (W.order() // S.order(), S.order() // U.order()),
                         format_value(v), before, len(new_pool), t.format())
        state.trace.append(line)
        if log:
            log(line.format())
        if changed:
            spent.clear()
            if strategy.restart_tranches:
                ti = 0
        spent.add(id(U))


def _signature(pool: Sequence[Entry]) -> tuple:
    return tuple((id(e.group), e.not_equal, tuple(id(q) for q in e.maximals)) for e in pool)


def run_sequence(legs: Sequence[Strategy], W, shape, resolve: Resolve, p: int,
                 orbits: tuple | None = None, log=None) -> DeductionResult:
    """Try each strategy in turn, carrying the pool between legs of the same kind."""
    if not legs:
        raise InputError("empty strategy sequence")
    state = None
    last: Exception | None = None
    for leg in legs:
        try:
            return run(leg, W, shape, resolve, p, state, orbits, log)
        except ChooserExhausted as exc:
            state, last = exc.state, exc
    raise ChooserExhausted(f"all strategies exhausted: {last}", state)


def simulated_oracle(W: P.PermGroup, G: P.PermGroup, stat: Statistic) -> Resolve:
    """Answer each query with ``s(q_U(G))`` for a known ``G``."""
    ev = Evaluator(W, stat)
    return lambda U: ev.value(U, G)


def simulated_run(strategy: Strategy, W: P.PermGroup, G: P.PermGroup, shape=None, p: int = 2):
    shape = shape if shape is not None else ("group", W)
    res = run(strategy, W, shape, simulated_oracle(W, G, strategy.stat), p,
              orbits=orbit_partition(G))
    return res.group, res.state.queries
