"""Brute-force reference implementations used to check the library.

Nothing here imports the algorithms under test: membership and run counts
are computed on the explicit product graph of an automaton with the shape
of a lasso word, and cardinalities by path counting on a finite graph.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import product

INF = "aleph0"
CONT = "continuum"


def lasso_graph(m, w):
    """Nodes ``(q, pos)``, edge multiset, start nodes and accepting nodes of ``M x w``."""
    n = len(w.prefix) + len(w.period)

    def nxt(i):
        return i + 1 if i + 1 < n else len(w.prefix)

    def sym(i):
        return w.prefix[i] if i < len(w.prefix) else w.period[i - len(w.prefix)]

    edges = defaultdict(list)
    for p, a, q in m.transitions:
        for i in range(n):
            if tuple(a) == sym(i):
                edges[(p, i)].append((q, nxt(i)))
    starts = [(q, 0) for q in sorted(m.initial)]
    accepting = {(q, i) for q in m.accepting for i in range(n)}
    return edges, starts, accepting


def automaton_graph(m):
    """The automaton itself as a graph; for deterministic ``m`` paths are words."""
    edges = defaultdict(list)
    for p, _, q in m.transitions:
        edges[p].append(q)
    return edges, sorted(m.initial), set(m.accepting)


def _reach(edges, sources):
    seen = set(sources)
    stack = list(sources)
    while stack:
        u = stack.pop()
        for v in edges.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


def _sccs(nodes, edges):
    """Components by mutual reachability (quadratic, fine for tiny graphs)."""
    reach = {u: _reach(edges, [v for v in edges.get(u, ())]) for u in nodes}
    comps, done = [], set()
    for u in nodes:
        if u in done:
            continue
        comp = {v for v in nodes if v == u or (v in reach[u] and u in reach[v])}
        done |= comp
        comps.append(comp)
    return comps, reach


def path_count(edges, starts, accepting):
    """Number of infinite paths from ``starts`` visiting ``accepting`` infinitely often.

    Returns an int, ``INF`` or ``CONT``.
    """
    nodes = sorted(_reach(edges, starts), key=repr)
    comps, reach = _sccs(nodes, edges)
    cyclic = []
    for comp in comps:
        inner = sum(1 for u in comp for v in edges.get(u, ()) if v in comp)
        if inner == 0 or not comp & accepting:
            continue
        if inner > len(comp):
            return CONT
        cyclic.append(comp)
    total = 0
    for comp in cyclic:
        for entry in comp:
            # paths reaching ``entry`` without touching ``comp`` before
            allowed = {u for u in nodes if u not in comp} | {entry}
            sub = {u: [v for v in edges.get(u, ()) if v in allowed] for u in allowed}
            sub[entry] = []
            heads = [s for s in starts if s in allowed]
            fwd = _reach(sub, heads)
            rev = defaultdict(list)
            for u, vs in sub.items():
                for v in vs:
                    rev[v].append(u)
            back = _reach(rev, [entry]) if entry in fwd else set()
            live = fwd & back
            for u in live:
                if u in _reach({k: [v for v in vs if v in live] for k, vs in sub.items()},
                               [v for v in sub.get(u, ()) if v in live]):
                    return INF
            memo = {}

            def count(u):
                if u == entry:
                    return 1
                if u not in memo:
                    memo[u] = sum(count(v) for v in sub.get(u, ()) if v in live)
                return memo[u]

            total += sum(count(s) for s in starts if s in live)
    return total


def member(m, w) -> bool:
    edges, starts, accepting = lasso_graph(m, w)
    reach = _reach(edges, starts)
    for v in accepting & reach:
        if v in _reach(edges, list(edges.get(v, ()))):
            return True
    return False


def run_count(m, w):
    return path_count(*lasso_graph(m, w))


def deterministic_language_size(m):
    """Language cardinality of a deterministic automaton (one run per word)."""
    return path_count(*automaton_graph(m))


def as_cardinality(value):
    from otl import ALEPH0, CONTINUUM, Finite
    if value == INF:
        return ALEPH0
    if value == CONT:
        return CONTINUUM
    return Finite(value)


def all_words(symbols, max_prefix, max_period):
    """Raw (possibly non-canonical) lasso pairs, for oracle sweeps."""
    for i in range(max_prefix + 1):
        for j in range(1, max_period + 1):
            for pre in product(symbols, repeat=i):
                for per in product(symbols, repeat=j):
                    yield pre, per
