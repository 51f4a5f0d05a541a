"""Deterministic parity automata, determinization and complementation.

Parity convention: a run is accepting iff the least priority seen
infinitely often is even.  A deterministic parity automaton lists its
transitions explicitly; any symbol without a listed transition leads to a
designated sink state.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import product
from typing import Sequence

from .automata import (BuchiAutomaton, TrackAlphabet, _check_budget, merge_initials,
                       trim)
from .lasso import LassoWord
from .product import LazyFactor, conjoin


class ParityAutomaton:
    """Deterministic parity automaton with an implicit default transition.

    ``delta`` maps ``(state, symbol)`` to a state.  Every pair not listed
    goes to ``sink``, which loops on all symbols; its priority decides
    whether such words are accepted (odd before complementing).
    """

    def __init__(self, tracks: Sequence[TrackAlphabet], n_states: int, initial: int,
                 priority: Sequence[int], delta: dict, sink: int):
        self.tracks = tuple(tracks)
        self.n_states = n_states
        self.initial = initial
        self.priority = tuple(priority)
        self.delta = dict(delta)
        self.sink = sink
        if len(self.priority) != n_states:
            raise ValueError("one priority per state required")
        if not 0 <= sink < n_states or not 0 <= initial < n_states:
            raise ValueError("sink and initial state must be declared states")
        if any(p == sink for p, _ in self.delta):
            raise ValueError("the sink state has no explicit transitions")
        self._adj = None

    @property
    def arity(self) -> int:
        return len(self.tracks)

    def step(self, q: int, symbol: tuple) -> int:
        return self.delta.get((q, symbol), self.sink)

    def out(self, q: int) -> list:
        """Listed ``(symbol, target)`` pairs leaving ``q``."""
        if self._adj is None:
            adj = [[] for _ in range(self.n_states)]
            for (p, a), t in self.delta.items():
                adj[p].append((a, t))
            self._adj = adj
        return self._adj[q]

    def symbols_used(self) -> set:
        return {a for (_, a) in self.delta}

    def run_priorities(self, w: LassoWord) -> list:
        """Priorities on the cycle of the unique run on ``w``."""
        q, pos = self.initial, 0
        seen = {}
        trace = []
        while (q, pos) not in seen:
            seen[(q, pos)] = len(trace)
            trace.append(q)
            q = self.step(q, w[pos])
            pos = w.next_position(pos)
        return [self.priority[s] for s in trace[seen[(q, pos)]:]]

    def member(self, w: LassoWord) -> bool:
        if w.tracks != self.arity:
            raise ValueError(f"word has {w.tracks} tracks, automaton {self.arity}")
        return min(self.run_priorities(w)) % 2 == 0

    def dual(self) -> "ParityAutomaton":
        """Complement: every priority shifted by one."""
        return ParityAutomaton(self.tracks, self.n_states, self.initial,
                               [p + 1 for p in self.priority], self.delta, self.sink)

    def __repr__(self):
        return f"ParityAutomaton(tracks={self.arity}, states={self.n_states})"


# ----------------------------------------------------------- determinization

def _deterministic_to_parity(m: BuchiAutomaton) -> ParityAutomaton:
    n = m.n_states
    sink = n
    prio = [0 if q in m.accepting else 1 for q in range(n)] + [1]
    delta = {(p, a): q for p, a, q in m.transitions}
    init = next(iter(m.initial)) if m.initial else sink
    return ParityAutomaton(m.tracks, n + 1, init, prio, delta, sink)


def _safra_step(tree: tuple, sym, m: BuchiAutomaton):
    """One step on a compact Safra tree.

    A tree is a tuple of ``(name, parent, label)`` sorted by name; names are
    ``1..k`` and the root, if present, is ``1`` with parent ``0``.
    Returns ``(new_tree, priority)``; priority is None when nothing happened.
    """
    F = m.accepting
    nodes = {name: [parent, label] for name, parent, label in tree}
    top = max(nodes, default=0)
    # spawn youngest children from accepting states
    fresh = top
    for name, parent, label in tree:
        acc = label & F
        if acc:
            fresh += 1
            nodes[fresh] = [name, acc]
    # apply the transition relation
    for name, node in nodes.items():
        lab = set()
        for q in node[1]:
            lab.update(m.successors(q, sym))
        node[1] = frozenset(lab)
    children = defaultdict(list)
    for name in sorted(nodes):
        parent = nodes[name][0]
        if parent:
            children[parent].append(name)
    # horizontal merge: older siblings (smaller names) keep shared states
    # (states claimed by an older sibling leave the whole younger subtree)
    stack = [(1, frozenset())] if 1 in nodes else []
    while stack:
        name, blocked = stack.pop()
        node = nodes[name]
        node[1] = node[1] - blocked
        claimed = blocked
        for c in children[name]:
            stack.append((c, claimed))
            claimed = claimed | (nodes[c][1] & node[1])

    removed = set()
    marked = set()

    # remove empty nodes (with their subtrees)
    def drop(name):
        todo = [name]
        while todo:
            x = todo.pop()
            removed.add(x)
            todo.extend(children[x])

    for name in sorted(nodes):
        if name not in removed and not nodes[name][1]:
            drop(name)
    # vertical merge: a node covered by its children absorbs them
    for name in sorted(nodes):
        if name in removed:
            continue
        kids = [c for c in children[name] if c not in removed]
        if kids:
            cover = frozenset().union(*(nodes[c][1] for c in kids))
            if cover == nodes[name][1]:
                for c in kids:
                    drop(c)
                marked.add(name)
    alive = sorted(n for n in nodes if n not in removed)
    ren = {old: i + 1 for i, old in enumerate(alive)}
    new_tree = tuple((ren[n], ren.get(nodes[n][0], 0), nodes[n][1]) for n in alive)
    r = min(removed, default=None)
    g = min(marked, default=None)
    if r is not None and (g is None or r < g):
        return new_tree, 2 * r - 1
    if g is not None:
        return new_tree, 2 * g
    return new_tree, None


def to_deterministic_parity(m: BuchiAutomaton, budget: int | None = None,
                            minimize: bool = True) -> ParityAutomaton:
    """Equivalent deterministic parity automaton (Safra trees)."""
    m = trim(m)
    m = merge_initials(m)
    if m.is_deterministic():
        dpa = _deterministic_to_parity(m)
        return minimize_parity(dpa) if minimize else dpa
    n = max(1, m.n_states)
    idle = 4 * n + 1
    root = ((1, 0, frozenset(m.initial)),) if m.initial else ()
    # transition-labelled Safra automaton
    ids = {root: 0}
    trees = [root]
    edges = {}
    i = 0
    while i < len(trees):
        tree = trees[i]
        syms = set()
        if tree:
            for q in tree[0][2]:
                syms.update(a for a, _, _ in m.out(q))
        for a in syms:
            nt, pr = _safra_step(tree, a, m)
            if nt not in ids:
                ids[nt] = len(trees)
                trees.append(nt)
                if len(trees) % 1024 == 0:
                    _check_budget(len(trees), budget, "determinization")
            edges[(i, a)] = (ids[nt], idle if pr is None else pr)
        i += 1
    _check_budget(len(trees), budget, "determinization")
    # move priorities from transitions onto states: state = (tree, last priority)
    by_src = defaultdict(list)
    incoming = defaultdict(set)
    for (t, a), (t2, pr) in edges.items():
        by_src[t].append((a, t2, pr))
        incoming[t2].add(pr)
    sid = {}
    states = []

    def intern(s):
        if s not in sid:
            sid[s] = len(states)
            states.append(s)
        return sid[s]

    # reuse an existing (tree, priority) state for the start if there is one
    start = intern((0, min(incoming[0]) if incoming[0] else idle))
    delta = {}
    j = 0
    while j < len(states):
        t, _ = states[j]
        for a, t2, pr in by_src[t]:
            delta[(j, a)] = intern((t2, pr))
        j += 1
        if j % 4096 == 0:
            _check_budget(len(states), budget, "determinization")
    _check_budget(len(states), budget, "determinization")
    sink = intern((-1, idle))
    prio = [p for _, p in states]
    dpa = ParityAutomaton(m.tracks, len(states), start, prio, delta, sink)
    return minimize_parity(dpa) if minimize else dpa


def minimize_parity(pa: ParityAutomaton) -> ParityAutomaton:
    """Restrict to reachable states and merge Moore-equivalent ones.

    Only states with identical priority behaviour are merged, so the
    result accepts the same language with the same priority sequence.
    """
    seen = {pa.initial, pa.sink}
    todo = [pa.initial]
    while todo:
        p = todo.pop()
        for _, q in pa.out(p):
            if q not in seen:
                seen.add(q)
                todo.append(q)
    states = sorted(seen)
    block = {q: pa.priority[q] for q in states}
    nblocks = len(set(block.values()))
    while True:
        # unlisted symbols lead to the sink, so listing the edges that leave
        # the sink's block determines the whole successor function
        sigs = {}
        new = {}
        sb = block[pa.sink]
        for q in states:
            moves = frozenset((a, block[t]) for a, t in pa.out(q) if block[t] != sb)
            new[q] = sigs.setdefault((block[q], moves), len(sigs))
        block = new
        if len(sigs) == nblocks:
            break
        nblocks = len(sigs)
    sink_block = block[pa.sink]
    delta = {}
    for q in states:
        b = block[q]
        if b == sink_block:
            continue
        for a, t in pa.out(q):
            if block[t] != sink_block:
                delta[(b, a)] = block[t]
    prio = [0] * nblocks
    for q in states:
        prio[block[q]] = pa.priority[q]
    return ParityAutomaton(pa.tracks, nblocks, block[pa.initial], prio, delta, sink_block)


# ------------------------------------------------------------ complementation

class ParityComplement(LazyFactor):
    """Lazy Buchi factor for the complement of a deterministic parity language.

    States are ``(copy, q)``.  Copy ``None`` follows the parity run; copy
    ``e`` (an even priority of the dual) commits to never seeing a dual
    priority below ``e`` again and accepts on visits to ``e``.
    """

    trivial_acceptance = False

    def __init__(self, pa: ParityAutomaton, tracks):
        self.pa = pa
        self.tracks = tuple(tracks)
        self.prio = [p + 1 for p in pa.priority]
        self.evens = sorted({p for p in self.prio if p % 2 == 0})

    def initial(self):
        return [(None, self.pa.initial)]

    def step(self, state, parts):
        copy, q = state
        t = self.pa.step(q, parts)
        pt = self.prio[t]
        if copy is None:
            return [(None, t)] + [(e, t) for e in self.evens if pt >= e]
        return [(copy, t)] if pt >= copy else []

    def accepting(self, state):
        copy, q = state
        return copy is not None and self.prio[q] == copy


def full_alphabet(tracks) -> list:
    return list(product(*(t.symbols for t in tracks)))


def complement(m: BuchiAutomaton, symbols=None, budget: int | None = None) -> BuchiAutomaton:
    """Buchi automaton for ``Gamma^omega \\ L(M)`` (full product alphabet by default)."""
    if symbols is None:
        symbols = full_alphabet(m.tracks)
    pa = to_deterministic_parity(m, budget)
    universe = BuchiAutomaton(m.tracks, 1, (0,), (0,), [(0, a, 0) for a in symbols],
                              check=False)
    return trim(conjoin(m.arity, [(universe, range(m.arity))],
                        [ParityComplement(pa, range(m.arity))], budget=budget,
                        tracks=m.tracks))


def difference(a: BuchiAutomaton, b: BuchiAutomaton, track_map: Sequence[int] | None = None,
               budget: int | None = None) -> BuchiAutomaton:
    """``L(A) \\ L(B)``; B's track ``j`` reads A's track ``track_map[j]``."""
    if track_map is None:
        track_map = range(a.arity)
    pa = to_deterministic_parity(b, budget)
    return trim(conjoin(a.arity, [(a, range(a.arity))], [ParityComplement(pa, track_map)],
                        budget=budget, tracks=a.tracks))


def parity_to_buchi(pa: ParityAutomaton, symbols=None) -> BuchiAutomaton:
    """Explicit Buchi automaton for a deterministic parity language.

    ``symbols`` adds alphabet letters beyond those listed in ``pa.delta``
    (they lead to the sink).
    """
    syms = sorted(set(pa.symbols_used()) | set(symbols or ()), key=repr)
    n = pa.n_states
    evens = sorted({p for p in pa.priority if p % 2 == 0})

    def idx(ci, q):
        return ci * n + q

    trans = []
    for q in range(n):
        for a in syms:
            t = pa.step(q, a)
            trans.append((idx(0, q), a, idx(0, t)))
            for ci, e in enumerate(evens, start=1):
                if pa.priority[t] >= e:
                    trans.append((idx(0, q), a, idx(ci, t)))
                    if pa.priority[q] >= e:
                        trans.append((idx(ci, q), a, idx(ci, t)))
    accepting = [idx(ci, q) for ci, e in enumerate(evens, start=1)
                 for q in range(n) if pa.priority[q] == e]
    res = BuchiAutomaton(pa.tracks, n * (len(evens) + 1), (idx(0, pa.initial),), accepting,
                         trans, check=False)
    return trim(res)
