"""Cardinalities of omega-regular languages: finite n, aleph_0 or continuum.

The decision works on a deterministic parity automaton.  The language is
uncountable iff some strongly connected part of the ``priority >= p``
subgraph (p even, with a state of priority p) branches.  Otherwise every
accepted word eventually cycles on one simple "good" cycle, and words are
counted exactly by the finite paths entering such a cycle.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import total_ordering

from .automata import (BuchiAutomaton, member, project, run_language, tarjan, trim,
                       useful_states)
from .lasso import LassoWord
from .parity import ParityAutomaton, full_alphabet, to_deterministic_parity
from .product import ConstantTrack, conjoin

_RANK = {"finite": 0, "aleph0": 1, "continuum": 2}


@total_ordering
@dataclass(frozen=True)
class Cardinality:
    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind not in _RANK:
            raise ValueError(f"unknown cardinality kind {self.kind!r}")
        if self.kind != "finite" and self.n:
            raise ValueError("only finite cardinalities carry a count")
        if self.n < 0:
            raise ValueError("negative count")

    @property
    def finite(self) -> bool:
        return self.kind == "finite"

    def _key(self):
        return (_RANK[self.kind], self.n)

    def __lt__(self, other):
        if not isinstance(other, Cardinality):
            return NotImplemented
        return self._key() < other._key()

    def __add__(self, other: "Cardinality") -> "Cardinality":
        if self.finite and other.finite:
            return Finite(self.n + other.n)
        return max(self, other)

    def __mul__(self, other: "Cardinality") -> "Cardinality":
        if self == Finite(0) or other == Finite(0):
            return Finite(0)
        if self.finite and other.finite:
            return Finite(self.n * other.n)
        return max(self, other)

    def __str__(self):
        return f"finite {self.n}" if self.finite else self.kind

    def __repr__(self):
        if self.finite:
            return f"Finite({self.n})"
        return "Aleph0" if self.kind == "aleph0" else "Continuum"

    @classmethod
    def parse(cls, text: str) -> "Cardinality":
        parts = text.split()
        if parts[0] == "finite" and len(parts) == 2:
            return Finite(int(parts[1]))
        if parts == ["aleph0"]:
            return ALEPH0
        if parts == ["continuum"]:
            return CONTINUUM
        raise ValueError(f"cannot parse cardinality {text!r}")


def Finite(n: int) -> Cardinality:
    return Cardinality("finite", n)


ALEPH0 = Cardinality("aleph0")
CONTINUUM = Cardinality("continuum")


def cardinal_sum(values) -> Cardinality:
    total = Finite(0)
    for v in values:
        total = total + v
    return total


# ------------------------------------------------------------ graph view

def _graph(pa: ParityAutomaton):
    """Reachable states and explicit edges; a rejecting sink is dropped."""
    sink_even = pa.priority[pa.sink] % 2 == 0
    alphabet = full_alphabet(pa.tracks) if sink_even else None
    adj = defaultdict(list)
    seen = {pa.initial}
    todo = [pa.initial]
    while todo:
        q = todo.pop()
        if q == pa.sink:
            edges = [(a, q) for a in alphabet] if sink_even else []
        elif sink_even:
            edges = [(a, pa.step(q, a)) for a in alphabet]
        else:
            edges = list(pa.out(q))
        adj[q] = edges
        for _, t in edges:
            if t not in seen:
                seen.add(t)
                todo.append(t)
    return seen, adj


def good_components(pa: ParityAutomaton, nodes=None, adj=None):
    """Yield ``(p, component)`` for SCCs of the ``prio >= p`` subgraphs that
    contain a state of even priority ``p`` and at least one edge."""
    if nodes is None:
        nodes, adj = _graph(pa)
    prio = pa.priority
    for p in sorted({prio[q] for q in nodes if prio[q] % 2 == 0}):
        sub = {q for q in nodes if prio[q] >= p}
        succ = lambda q, sub=sub: [t for _, t in adj[q] if t in sub]
        for comp in tarjan(sorted(sub), succ):
            cs = set(comp)
            if not any(prio[q] == p for q in comp):
                continue
            if len(comp) == 1 and comp[0] not in succ(comp[0]):
                continue
            yield p, cs


def is_uncountable(pa: ParityAutomaton) -> bool:
    nodes, adj = _graph(pa)
    for _, comp in good_components(pa, nodes, adj):
        for q in comp:
            if sum(1 for _, t in adj[q] if t in comp) >= 2:
                return True
    return False


def good_cycles(pa: ParityAutomaton, nodes=None, adj=None) -> list:
    """Distinct good simple cycles as ``[(state, symbol, next_state), ...]``.

    Only meaningful when the language is countable (components are then
    simple cycles).
    """
    if nodes is None:
        nodes, adj = _graph(pa)
    seen = set()
    cycles = []
    for _, comp in good_components(pa, nodes, adj):
        key = frozenset(comp)
        if key in seen:
            continue
        seen.add(key)
        start = min(comp)
        edges = []
        q = start
        while True:
            a, t = next((a, t) for a, t in adj[q] if t in comp)
            edges.append((q, a, t))
            q = t
            if q == start:
                break
        cycles.append(edges)
    return cycles


def _predecessors(nodes, adj):
    pred = defaultdict(list)
    for s in nodes:
        for a, t in adj[s]:
            pred[t].append((s, a))
    return pred


def _entry_counts(pa, nodes, adj, cycle, entry, pred=None):
    """Number of finite words whose run ends at ``entry`` having just
    arrived from outside ``cycle`` (or the empty word when entry is initial).
    Returns an int or None for infinitely many."""
    if pred is None:
        pred = _predecessors(nodes, adj)
    cedges = {(s, a, t) for s, a, t in cycle}
    sources = defaultdict(int)
    for s, a in pred[entry]:
        if (s, a, entry) not in cedges:
            sources[s] += 1
    back = set(sources)
    todo = list(back)
    while todo:
        q = todo.pop()
        for p, _ in pred[q]:
            if p not in back:
                back.add(p)
                todo.append(p)
    base = 1 if pa.initial == entry else 0
    if pa.initial not in back:
        return base
    succ = lambda q: [t for _, t in adj[q] if t in back]
    comps = tarjan([pa.initial], succ)
    for comp in comps:
        if len(comp) > 1 or comp[0] in succ(comp[0]):
            return None
    # tarjan emits components in reverse topological order
    paths = defaultdict(int)
    paths[pa.initial] = 1
    for comp in reversed(comps):
        q = comp[0]
        for _, t in adj[q]:
            if t in back:
                paths[t] += paths[q]
    return base + sum(paths[s] * k for s, k in sources.items())


def parity_cardinality(pa: ParityAutomaton) -> Cardinality:
    nodes, adj = _graph(pa)
    if is_uncountable(pa):
        return CONTINUUM
    total = 0
    pred = _predecessors(nodes, adj)
    for cycle in good_cycles(pa, nodes, adj):
        for entry in {s for s, _, _ in cycle}:
            c = _entry_counts(pa, nodes, adj, cycle, entry, pred)
            if c is None:
                return ALEPH0
            total += c
    return Finite(total)


def language_cardinality(m: BuchiAutomaton | ParityAutomaton, budget: int | None = None) -> Cardinality:
    """Exact ``|L(M)|`` in N + {aleph_0, 2^aleph_0}."""
    if isinstance(m, ParityAutomaton):
        return parity_cardinality(m)
    m = trim(m)
    if m.n_states == 0:
        return Finite(0)
    return parity_cardinality(to_deterministic_parity(m, budget))


def count_accepting_runs(m: BuchiAutomaton, w: LassoWord) -> Cardinality:
    """Number of accepting runs of M on w (the run language is deterministic)."""
    return language_cardinality(run_language(m, w))


def enumerate_members(m: BuchiAutomaton, size_bound: int, limit: int | None = None) -> set:
    """All canonical lassos with ``|prefix|, |period| <= size_bound`` in L(M)."""
    m = trim(m)
    found: set = set()
    if m.n_states == 0:
        return found
    useful = useful_states(m)
    symbols = sorted(m.symbols_used(), key=repr)

    def step(states, a):
        return frozenset(t for q in states for t in m.successors(q, a) if t in useful)

    def periods(states, last):
        stack = [((), states)]
        while stack:
            v, cur = stack.pop()
            if v and (last is None or v[-1] != last):
                yield v
            if len(v) < size_bound:
                for a in symbols:
                    nxt = step(cur, a)
                    if nxt:
                        stack.append((v + (a,), nxt))

    stack = [((), frozenset(m.initial) & useful)]
    while stack:
        u, states = stack.pop()
        for v in periods(states, u[-1] if u else None):
            w = LassoWord(u, v)
            if len(w.period) == len(v) and w not in found and member(m, w):
                found.add(w)
                if limit is not None and len(found) >= limit:
                    return found
        if len(u) < size_bound:
            for a in symbols:
                nxt = step(states, a)
                if nxt:
                    stack.append((u + (a,), nxt))
    return found


def fix_track(m: BuchiAutomaton, track: int, word: LassoWord) -> BuchiAutomaton:
    """Words ``y`` (remaining tracks) with ``word`` on ``track`` accepted.

    ``word`` is single-track (its atoms are the track's atoms).  Runs are
    preserved one-to-one.
    """
    k = m.arity
    prod = conjoin(k, [(m, range(k))], [ConstantTrack(track, word)])
    return project(prod, track)


def section_cardinality(m: BuchiAutomaton, x: LassoWord, budget: int | None = None) -> Cardinality:
    """``|{y : x (x) y in L(M)}|`` for a 2-track M and a 1-track word x."""
    return language_cardinality(fix_track(m, 0, x), budget)
