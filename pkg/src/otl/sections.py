"""Automata classifying x by the cardinality of the section {y : x (x) y in R}.

All classifiers read x on a single track.  ``R`` is a 2-track Buchi
automaton with x on track 0 and y on track 1.

* Continuum: two copies of the deterministic run on (x, y) start at a
  common state, diverge on y, stay at priorities >= p (p even), both see
  p, and meet again in one state; this repeats forever.  Any choice of
  segment per round gives an accepted y, hence continuum many.
* Infinite: a spine run along some y, an accepting carrier run, and
  infinitely many branches, each leaving the spine at a new position and
  later meeting the carrier.  Each branch yields a distinct accepted y.
* At least n: n copies of R with lexicographically increasing y tracks.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from itertools import product

from .automata import (BuchiAutomaton, StateBudgetExceeded, TrackAlphabet,
                       _check_budget, lasso_automaton, map_symbols, trim, union_all,
                       universal_automaton, empty_automaton)
from .cardinality import (ALEPH0, CONTINUUM, Cardinality, Finite, enumerate_members,
                          section_cardinality)
from .lasso import all_lassos
from .parity import difference, to_deterministic_parity
from .product import LexLess, conjoin


@dataclass(frozen=True)
class Target:
    """A section cardinality class.

    ``kind`` is one of ``exactly``, ``atleast``, ``aleph0``, ``continuum``,
    ``infinite``.  ``atleast n`` includes infinite sections.
    """

    kind: str
    n: int = 0

    def matches(self, c: Cardinality) -> bool:
        if self.kind == "exactly":
            return c == Finite(self.n)
        if self.kind == "atleast":
            return c >= Finite(self.n)
        if self.kind == "aleph0":
            return c == ALEPH0
        if self.kind == "continuum":
            return c == CONTINUUM
        if self.kind == "infinite":
            return not c.finite
        raise ValueError(f"unknown target {self.kind!r}")

    def __str__(self):
        return f"{self.kind} {self.n}" if self.kind in ("exactly", "atleast") else self.kind


def Exactly(n: int) -> Target:
    return Target("exactly", n)


def AtLeast(n: int) -> Target:
    return Target("atleast", n)


INFINITE = Target("infinite")
ALEPH0_SECTION = Target("aleph0")
CONTINUUM_SECTION = Target("continuum")


def target_for(c: Cardinality) -> Target:
    if c.finite:
        return Exactly(c.n)
    return ALEPH0_SECTION if c == ALEPH0 else CONTINUUM_SECTION


@dataclass
class Classifier:
    automaton: BuchiAutomaton
    target: Target
    exact: bool = True
    samples: tuple = field(default=())


def _x_index(dpa):
    """``idx[q][x] = [(y, t), ...]`` over listed, non-sink transitions."""
    idx = defaultdict(lambda: defaultdict(list))
    for (q, (a, b)), t in dpa.delta.items():
        if t != dpa.sink:
            idx[q][a].append((b, t))
    return idx


def _explore(initial, step, accepting, x_track: TrackAlphabet, budget):
    """Build an explicit 1-track automaton from a successor function."""
    ids = {}
    order = []

    def intern(s):
        if s not in ids:
            ids[s] = len(order)
            order.append(s)
            if len(order) % 4096 == 0:
                _check_budget(len(order), budget, "section classifier")
        return ids[s]

    init = [intern(s) for s in initial]
    trans = []
    i = 0
    while i < len(order):
        for a, t in step(order[i]):
            trans.append((i, (a,), intern(t)))
        i += 1
    _check_budget(len(order), budget, "section classifier")
    acc = [j for j, s in enumerate(order) if accepting(s)]
    return trim(BuchiAutomaton((x_track,), len(order), init, acc, trans, check=False))


def continuum_classifier(rel: BuchiAutomaton, budget=None) -> BuchiAutomaton:
    dpa = to_deterministic_parity(rel, budget)
    idx = _x_index(dpa)
    prio = dpa.priority
    evens = sorted({p for p in prio if p % 2 == 0})

    def step(state):
        tag = state[0]
        if tag == "pre":
            s = state[1]
            for a, moves in idx[s].items():
                for _, t in moves:
                    yield a, ("pre", t)
                for p in evens:
                    for out in _pair_moves(p, s, s, False, False, False, moves, moves):
                        yield a, out
            return
        if tag == "chk":
            _, p, s = state
            for a, moves in idx[s].items():
                for out in _pair_moves(p, s, s, False, False, False, moves, moves):
                    yield a, out
            return
        _, p, s1, s2, div, f1, f2 = state
        for a in set(idx[s1]) & set(idx[s2]):
            for out in _pair_moves(p, s1, s2, div, f1, f2, idx[s1][a], idx[s2][a]):
                yield a, out

    def _pair_moves(p, s1, s2, div, f1, f2, m1, m2):
        for y1, t1 in m1:
            if prio[t1] < p:
                continue
            for y2, t2 in m2:
                if prio[t2] < p:
                    continue
                d = div or y1 != y2
                g1 = f1 or prio[t1] == p
                g2 = f2 or prio[t2] == p
                if t1 == t2 and d and g1 and g2:
                    yield ("chk", p, t1)
                yield ("mid", p, t1, t2, d, g1, g2)

    return _explore([("pre", dpa.initial)], step, lambda s: s[0] == "chk",
                    rel.tracks[0], budget)


def infinite_classifier(rel: BuchiAutomaton, budget=None) -> BuchiAutomaton:
    dpa = to_deterministic_parity(rel, budget)
    idx = _x_index(dpa)
    prio = dpa.priority
    evens = sorted({p for p in prio if p % 2 == 0})

    # state: (spine, carrier, branch or None, p or None, flag, accept-mark)
    def step(state):
        s, c, b, p, f, _ = state
        for a in idx[s]:
            if a not in idx[c]:
                continue
            for ys, ts in idx[s][a]:
                for _, tc in idx[c][a]:
                    if p is not None and prio[tc] < p:
                        continue
                    commits = [p] if p is not None else [None] + [e for e in evens if prio[tc] >= e]
                    branches = []
                    if b is None:
                        branches.append((None, False))
                        for yb, tb in idx[s][a]:
                            if yb != ys:
                                branches.append((None, True) if tb == tc else (tb, False))
                    else:
                        for _, tb in idx[b].get(a, ()):
                            branches.append((None, True) if tb == tc else (tb, False))
                    for p2 in commits:
                        for nb, merged in branches:
                            if p2 is None:
                                yield a, (ts, tc, nb, None, 0, False)
                                continue
                            f2, mark = f, False
                            if f2 == 0 and prio[tc] == p2:
                                f2 = 1
                            if f2 == 1 and merged:
                                f2, mark = 0, True
                            yield a, (ts, tc, nb, p2, f2, mark)

    init = (dpa.initial, dpa.initial, None, None, 0, False)
    return _explore([init], step, lambda s: s[5], rel.tracks[0], budget)


def atleast_classifier(rel: BuchiAutomaton, n: int, universe: BuchiAutomaton | None = None,
                       budget=None) -> BuchiAutomaton:
    if n <= 0:
        return universe if universe is not None else universal_automaton(rel.tracks[:1])
    explicit = [(rel, (0, i)) for i in range(1, n + 1)]
    if universe is not None:
        explicit.append((universe, (0,)))
    lazy = [LexLess(i, i + 1) for i in range(1, n)]
    prod = conjoin(n + 1, explicit, lazy, budget=budget)
    return trim(map_symbols(prod, lambda s: (s[0],), rel.tracks[:1]))


def _universe(rel, universe):
    return universe if universe is not None else universal_automaton(rel.tracks[:1])


def build_exact(rel: BuchiAutomaton, target: Target, universe=None, budget=None) -> BuchiAutomaton:
    """Exact classifier automaton; may raise :class:`StateBudgetExceeded`."""
    if rel.arity != 2:
        raise ValueError("section classifiers need a 2-track relation")
    uni = _universe(rel, universe)
    if target.kind == "continuum":
        res = continuum_classifier(rel, budget)
    elif target.kind == "infinite":
        res = infinite_classifier(rel, budget)
    elif target.kind == "aleph0":
        res = difference(infinite_classifier(rel, budget), continuum_classifier(rel, budget),
                         budget=budget)
    elif target.kind == "atleast":
        res = atleast_classifier(rel, target.n, universe, budget)
    elif target.kind == "exactly":
        lo = atleast_classifier(rel, target.n, uni, budget)
        res = difference(lo, atleast_classifier(rel, target.n + 1, None, budget), budget=budget)
    else:
        raise ValueError(f"unsupported target {target}")
    if universe is not None and target.kind not in ("atleast", "exactly"):
        res = trim(conjoin(1, [(res, (0,)), (universe, (0,))], budget=budget))
    return res


def sampled_classifier(rel: BuchiAutomaton, target: Target, universe=None,
                       size_bound: int = 2, budget=None) -> Classifier:
    """Fallback: classify concrete lassos x one at a time (bounded)."""
    if universe is not None:
        xs = sorted(enumerate_members(universe, size_bound), key=str)
    else:
        xs = list(all_lassos([(a,) for a in rel.tracks[0].symbols], size_bound, size_bound))
    hits = [x for x in xs if target.matches(section_cardinality(rel, x, budget))]
    if hits:
        auto = union_all([lasso_automaton(x, rel.tracks[:1]) for x in hits])
    else:
        auto = empty_automaton(rel.tracks[:1])
    return Classifier(auto, target, exact=False, samples=tuple(hits))


def section_classifier(rel: BuchiAutomaton, target: Target, universe=None, budget=None,
                       fallback: bool = True, size_bound: int = 2) -> Classifier:
    """Classifier for ``target``; falls back to sampling past the state budget."""
    try:
        return Classifier(build_exact(rel, target, universe, budget), target, exact=True)
    except StateBudgetExceeded:
        if not fallback:
            raise
        return sampled_classifier(rel, target, universe, size_bound, budget)
