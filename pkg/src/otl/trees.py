"""Forests given by an edge relation E, and isomorphism tests for height 1 and 2.

A forest has height <= n when no node has two parents and there is no
E-chain with n+1 edges.  Height-1 trees are isomorphic iff their leaf sets
have equal size.  Height-2 trees are isomorphic iff for every cardinal
lambda they have equally many children with lambda leaves; these counts
form the signature.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .automata import (BuchiAutomaton, StateBudgetExceeded, bisimulation_reduce, emptiness, find_member, member,
                       project, restrict_initial, tarjan, trim, useful_states)
from .cardinality import (ALEPH0, CONTINUUM, Cardinality, Finite, enumerate_members, fix_track,
                          good_cycles, is_uncountable, language_cardinality,
                          section_cardinality, _graph)
from .constructions import roots_automaton
from .lasso import LassoWord
from .parity import difference, to_deterministic_parity
from .presentation import Presentation
from .product import Distinct, conjoin
from .sections import Exactly, INFINITE, ALEPH0_SECTION, CONTINUUM_SECTION, AtLeast, section_classifier


class HeightViolation(ValueError):
    pass


def _edge(p: Presentation, edge: str = "E", budget=None) -> BuchiAutomaton:
    e = p.relation(edge)
    # cached on the presentation; keyed by the automata so replacing them invalidates
    cache = p.__dict__.setdefault("_edge_cache", {})
    key = (edge, id(e), id(p.domain))
    if key not in cache:
        cache[key] = bisimulation_reduce(conjoin(2, [(e, (0, 1)), (p.domain, (0,)),
                                                     (p.domain, (1,))], budget=budget))
    return cache[key]


def has_shared_children(p: Presentation, edge: str = "E", budget=None) -> bool:
    e = _edge(p, edge, budget)
    if p.identity:
        clash = conjoin(3, [(e, (1, 0)), (e, (2, 0))], [Distinct(1, 2)], budget=budget)
    else:
        both = trim(conjoin(3, [(e, (1, 0)), (e, (2, 0))], budget=budget))
        clash = difference(both, p.equality, track_map=(1, 2), budget=budget)
    return not emptiness(clash)


def chain_levels(p: Presentation, n: int, edge: str = "E", budget=None) -> list:
    """``levels[j]`` accepts the nodes with an incoming E-chain of j edges."""
    e = _edge(p, edge, budget)
    level = p.domain
    levels = [level]
    for j in range(n + 1):
        # e is already restricted to the domain, so the first step is a projection
        pairs = e if j == 0 else conjoin(2, [(level, (0,)), (e, (0, 1))], budget=budget)
        level = bisimulation_reduce(project(pairs, 0))
        levels.append(level)
        if emptiness(level):
            break
    return levels


def check_forest_height(p: Presentation, n: int, edge: str = "E", budget=None) -> bool:
    """True iff the structure is a forest of height at most ``n``."""
    if edge not in p.relations:
        raise KeyError(f"missing relation {edge!r}")
    if has_shared_children(p, edge, budget):
        return False
    levels = chain_levels(p, n, edge, budget)
    return len(levels) <= n + 1 or emptiness(levels[n + 1])


def forest_roots(p: Presentation, edge: str = "E", budget=None) -> BuchiAutomaton:
    return roots_automaton(p, edge, budget)


def tree_root(p: Presentation, edge: str = "E", budget=None) -> LassoWord:
    """The unique root; raises if the forest does not have exactly one."""
    roots = forest_roots(p, edge, budget)
    count = language_cardinality(roots, budget)
    if count != Finite(1):
        raise HeightViolation(f"expected a tree with one root, found {count!r} roots")
    return find_member(roots)


def children(p: Presentation, node: LassoWord, edge: str = "E", budget=None) -> BuchiAutomaton:
    """1-track automaton of the E-successors of ``node``."""
    if not member(p.domain, node):
        raise ValueError(f"{node} is not in the domain")
    return trim(fix_track(_edge(p, edge, budget), 0, node))


def leaf_cardinality(p: Presentation, root: LassoWord, edge: str = "E", budget=None) -> Cardinality:
    """Number of children of ``root`` (its leaves, below height 1)."""
    return language_cardinality(children(p, root, edge, budget), budget)


def leaves(p: Presentation, edge: str = "E", budget=None) -> BuchiAutomaton:
    """Domain elements without children."""
    parents = project(_edge(p, edge, budget), 1)
    return trim(difference(p.domain, parents, budget=budget))


def iso_height1(p1: Presentation, p2: Presentation, edge: str = "E", budget=None) -> bool:
    for p in (p1, p2):
        if not check_forest_height(p, 1, edge, budget):
            raise HeightViolation("input is not a forest of height <= 1")
    c1 = leaf_cardinality(p1, tree_root(p1, edge, budget), edge, budget)
    c2 = leaf_cardinality(p2, tree_root(p2, edge, budget), edge, budget)
    return c1 == c2


# ----------------------------------------------------------------- height 2

OVER = "over"  # section finite but above the bound


@dataclass
class TreeSignature:
    """``entries[lambda] = kappa``: children with lambda leaves, zero counts omitted."""

    entries: dict
    bound: int
    truncated: bool
    method: str = "exact"
    over: Cardinality = field(default_factory=lambda: Finite(0))

    @property
    def exact(self) -> bool:
        return self.method != "sampled"

    def get(self, lam: Cardinality) -> Cardinality:
        return self.entries.get(lam, Finite(0))

    def __str__(self):
        items = ", ".join(f"{l!r}->{k!r}" for l, k in sorted(self.entries.items()))
        return f"{{{items}}} bound={self.bound} truncated={self.truncated} method={self.method}"


@dataclass(frozen=True)
class Verdict:
    kind: str  # "NonIsomorphic" | "Isomorphic" | "ConsistentUpTo"
    witness: Cardinality | None = None
    kappa1: Cardinality | None = None
    kappa2: Cardinality | None = None
    bound: int = 0
    bounded: bool = False

    def __str__(self):
        if self.kind == "NonIsomorphic":
            return (f"non-isomorphic: witness {self.witness!r} "
                    f"kappa1={self.kappa1!r} kappa2={self.kappa2!r}")
        if self.kind == "Isomorphic":
            return "isomorphic"
        note = " (bounded sampling)" if self.bounded else ""
        return f"consistent up to {self.bound}{note}"


def _classes(bound: int) -> list:
    return [Finite(n) for n in range(bound + 1)] + [ALEPH0, CONTINUUM]


class _Counter:
    """Capped counts of y-prefixes grouped by the set of reached states."""

    def __init__(self, rel: BuchiAutomaton, cap: int):
        self.rel = rel
        self.cap = cap
        self.useful = useful_states(rel)
        idx = defaultdict(lambda: defaultdict(list))
        for q, (a, b), t in rel.transitions:
            if t in self.useful:
                idx[q][a].append((b, t))
        self.idx = idx
        self._moves = {}
        self._steps = {}

    def moves(self, states, a) -> tuple:
        """Successor state sets of ``states`` on ``a``, one per y-letter."""
        key = (states, a)
        if key not in self._moves:
            groups = defaultdict(set)
            for q in states:
                for b, t in self.idx[q].get(a, ()):
                    groups[b].add(t)
            self._moves[key] = tuple(frozenset(ts) for ts in groups.values())
        return self._moves[key]

    def start(self):
        init = frozenset(self.rel.initial) & self.useful
        return frozenset({init: 1}.items()) if init else frozenset()

    def step(self, vec, a):
        key = (vec, a)
        if key in self._steps:
            return self._steps[key]
        out = defaultdict(int)
        for states, cnt in vec:
            for ts in self.moves(states, a):
                out[ts] = min(self.cap, out[ts] + cnt)
        res = self._steps[key] = frozenset(out.items())
        return res


def _section_value(counter: _Counter, vec, tail_card, bound):
    """Section size from a counting vector and per-subset tail cardinalities."""
    total = Finite(0)
    over = False
    for states, cnt in vec:
        c = tail_card(states)
        if c == Finite(0):
            continue
        if not c.finite:
            total = max(total, c) if not total.finite else c
            continue
        if total.finite:
            if cnt >= counter.cap:
                over = True
            total = Finite(total.n + cnt * c.n)
    if total.finite and (over or total.n > bound):
        return OVER
    return total


def _exact_signature(x_pa, rel: BuchiAutomaton, bound: int, budget=None) -> tuple[dict, Cardinality]:
    """Signature when the child language (deterministic ``x_pa``) is countable."""
    counter = _Counter(rel, bound + 1)
    nodes, adj = _graph(x_pa)
    result = defaultdict(lambda: Finite(0))
    over = Finite(0)
    limit = budget if budget is not None else 10**6
    for cycle in good_cycles(x_pa, nodes, adj):
        cedges = {(s, a, t) for s, a, t in cycle}
        for k, (entry, _, _) in enumerate(cycle):
            loop = [a for _, a, _ in cycle[k:] + cycle[:k]]
            tail = LassoWord([], loop)
            cache = {}

            def tail_card(states, tail=tail, cache=cache):
                if states not in cache:
                    sec = fix_track(restrict_initial(rel, states), 0, tail)
                    cache[states] = language_cardinality(sec, budget)
                return cache[states]

            # product of the child automaton's paths with the counting vector
            start = (x_pa.initial, counter.start())
            ids = {start: 0}
            order = [start]
            succ = defaultdict(list)
            terminals = defaultdict(list)  # node -> section values of arriving at entry
            if x_pa.initial == entry:
                terminals[0].append(_section_value(counter, start[1], tail_card, bound))
            i = 0
            while i < len(order):
                q, vec = order[i]
                for a, t in adj[q]:
                    vec2 = counter.step(vec, a[0])
                    if t == entry and (q, a, t) not in cedges:
                        terminals[i].append(_section_value(counter, vec2, tail_card, bound))
                    node = (t, vec2)
                    if node not in ids:
                        ids[node] = len(order)
                        order.append(node)
                        if len(order) > limit:
                            raise StateBudgetExceeded("height-2 signature: counting product too large")
                    succ[i].append(ids[node])
                i += 1
            # keep nodes that can reach a terminal
            pred = defaultdict(list)
            for u, vs in succ.items():
                for v in vs:
                    pred[v].append(u)
            live = set(terminals)
            todo = list(live)
            while todo:
                v = todo.pop()
                for u in pred[v]:
                    if u not in live:
                        live.add(u)
                        todo.append(u)
            if 0 not in live:
                continue
            s_of = lambda u: [v for v in succ[u] if v in live]
            comps = tarjan([0], s_of)
            cyclic = set()
            for comp in comps:
                if len(comp) > 1 or comp[0] in s_of(comp[0]):
                    cyclic.update(comp)
            # nodes reachable from a cycle see infinitely many paths
            todo = list(cyclic)
            inf = set(cyclic)
            while todo:
                u = todo.pop()
                for v in s_of(u):
                    if v not in inf:
                        inf.add(v)
                        todo.append(v)
            paths = defaultdict(int)
            paths[0] = 1
            for comp in reversed(comps):
                u = comp[0]
                if u in inf:
                    continue
                for v in s_of(u):
                    paths[v] += paths[u]
            for u, values in terminals.items():
                if u not in live:
                    continue
                for val in values:
                    n = ALEPH0 if u in inf else Finite(paths[u])
                    if val == OVER:
                        over = over + n
                    else:
                        result[val] = result[val] + n
    return {k: v for k, v in result.items() if v != Finite(0)}, over


def height2_signature(p: Presentation, root: LassoWord, bound: int, edge: str = "E",
                      budget=None, sample_size: int = 2) -> TreeSignature:
    """Counts of children of ``root`` by their number of leaves, up to ``bound``."""
    e = _edge(p, edge, budget)
    kids = trim(fix_track(e, 0, root))
    try:
        x_pa = to_deterministic_parity(kids, budget)
        if not is_uncountable(x_pa):
            entries, over = _exact_signature(x_pa, e, bound, budget)
            return TreeSignature(entries, bound, over != Finite(0), "exact", over)
        entries = {}
        over = Finite(0)
        for lam in _classes(bound):
            target = Exactly(lam.n) if lam.finite else (
                ALEPH0_SECTION if lam == ALEPH0 else CONTINUUM_SECTION)
            cls = section_classifier(e, target, budget=budget, fallback=False)
            k = language_cardinality(conjoin(1, [(kids, (0,)), (cls.automaton, (0,))]), budget)
            if k != Finite(0):
                entries[lam] = k
        big = section_classifier(e, AtLeast(bound + 1), budget=budget, fallback=False).automaton
        inf = section_classifier(e, INFINITE, budget=budget, fallback=False).automaton
        finite_big = difference(conjoin(1, [(kids, (0,)), (big, (0,))]), inf, budget=budget)
        over = language_cardinality(finite_big, budget)
        return TreeSignature(entries, bound, over != Finite(0), "classifier", over)
    except StateBudgetExceeded:
        pass
    # bounded fallback: inspect sampled children one by one
    entries = defaultdict(lambda: Finite(0))
    for x in sorted(enumerate_members(kids, sample_size), key=str):
        c = section_cardinality(e, x, budget)
        if c.finite and c.n > bound:
            continue
        entries[c] = entries[c] + Finite(1)
    return TreeSignature(dict(entries), bound, True, "sampled")


def iso_height2(p1: Presentation, p2: Presentation, bound: int, edge: str = "E",
                budget=None, check_height: bool = True) -> Verdict:
    for p in (p1, p2):
        if check_height and not check_forest_height(p, 2, edge, budget):
            raise HeightViolation("input is not a forest of height <= 2")
    s1 = height2_signature(p1, tree_root(p1, edge, budget), bound, edge, budget)
    s2 = height2_signature(p2, tree_root(p2, edge, budget), bound, edge, budget)
    return compare_signatures(s1, s2)


def compare_signatures(s1: TreeSignature, s2: TreeSignature) -> Verdict:
    bound = min(s1.bound, s2.bound)
    bounded = not (s1.exact and s2.exact)
    if not bounded:
        for lam in _classes(bound):
            k1, k2 = s1.get(lam), s2.get(lam)
            if k1 != k2:
                return Verdict("NonIsomorphic", lam, k1, k2, bound)
        if not s1.truncated and not s2.truncated:
            return Verdict("Isomorphic", bound=bound)
    return Verdict("ConsistentUpTo", bound=bound, bounded=bounded)
