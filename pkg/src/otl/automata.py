"""Multi-track Buchi automata and the run-count preserving constructions.

Symbols of a k-track automaton are k-tuples of atoms.  Atoms are arbitrary
hashable values; tuples of tuples are used freely to pack several tracks of
an inner structure into one track of an outer one.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable, Sequence

from .lasso import PAD, LassoWord


class StateBudgetExceeded(RuntimeError):
    """An exponential construction grew past its configured state cap."""


class AlphabetMismatch(ValueError):
    pass


class ArityMismatch(ValueError):
    pass


def default_budget() -> int:
    return int(os.environ.get("OTL_MAX_STATES", 10**6))


def _check_budget(n: int, budget: int | None, what: str) -> None:
    if budget is None:
        budget = default_budget()
    if n > budget:
        raise StateBudgetExceeded(f"{what}: more than {budget} states")


@dataclass(frozen=True)
class TrackAlphabet:
    symbols: tuple
    pad: Hashable | None = None

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if not self.symbols:
            raise ValueError("track alphabet must be nonempty")
        if self.pad is not None and self.symbols.count(self.pad) != 1:
            raise ValueError("pad symbol must occur exactly once in the alphabet")

    def union(self, other: "TrackAlphabet") -> "TrackAlphabet":
        if self.pad is not None and other.pad is not None and self.pad != other.pad:
            raise AlphabetMismatch(f"pad symbols differ: {self.pad!r} vs {other.pad!r}")
        merged = list(self.symbols)
        known = set(merged)
        merged += [s for s in other.symbols if s not in known]
        return TrackAlphabet(tuple(merged), self.pad if self.pad is not None else other.pad)


def alphabet(*symbols: Hashable, pad: bool = False) -> TrackAlphabet:
    """Shorthand: ``alphabet('a', 'b', pad=True)`` adds the pad symbol."""
    syms = tuple(symbols) + ((PAD,) if pad else ())
    return TrackAlphabet(syms, PAD if pad else None)


class BuchiAutomaton:
    """Nondeterministic Buchi automaton ``(Q, Gamma^k, Delta, I, F)``.

    States are ``0 .. n_states-1``.  Instances are immutable; adjacency
    indexes are built once at construction.
    """

    __slots__ = ("tracks", "n_states", "initial", "accepting", "transitions",
                 "_out", "_by_sym")

    def __init__(self, tracks: Sequence[TrackAlphabet], n_states: int,
                 initial: Iterable[int], accepting: Iterable[int],
                 transitions: Iterable[tuple], check: bool = True):
        tracks = tuple(tracks)
        transitions = tuple(dict.fromkeys((p, tuple(a), q) for p, a, q in transitions))
        initial = frozenset(initial)
        accepting = frozenset(accepting)
        if check:
            k = len(tracks)
            allowed = [set(t.symbols) for t in tracks]
            for q in initial | accepting:
                if not 0 <= q < n_states:
                    raise ValueError(f"state {q} out of range")
            for p, a, q in transitions:
                if not (0 <= p < n_states and 0 <= q < n_states):
                    raise ValueError(f"transition {(p, a, q)} references undeclared state")
                if len(a) != k:
                    raise ArityMismatch(f"symbol {a!r} has {len(a)} components, expected {k}")
                for comp, ok in zip(a, allowed):
                    if comp not in ok:
                        raise ValueError(f"symbol component {comp!r} not in its track alphabet")
        object.__setattr__(self, "tracks", tracks)
        object.__setattr__(self, "n_states", n_states)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "accepting", accepting)
        object.__setattr__(self, "transitions", transitions)
        out = [[] for _ in range(n_states)]
        by_sym = [defaultdict(list) for _ in range(n_states)]
        for i, (p, a, q) in enumerate(transitions):
            out[p].append((a, q, i))
            by_sym[p][a].append(q)
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_by_sym", by_sym)

    def __setattr__(self, name, value):
        raise AttributeError("BuchiAutomaton is immutable")

    def __reduce__(self):
        return (BuchiAutomaton, (self.tracks, self.n_states, self.initial, self.accepting,
                                 self.transitions, False))

    @classmethod
    def build(cls, n_states: int, initial, accepting, transitions, tracks=None,
              pads: Sequence[Hashable | None] | None = None) -> "BuchiAutomaton":
        """Construct, deriving track alphabets from the transitions if needed.

        ``tracks`` may be a list of :class:`TrackAlphabet` or an integer track
        count; in the latter case each track's alphabet is the set of atoms
        that occur on it (plus the pad, if requested).
        """
        transitions = [(p, tuple(a), q) for p, a, q in transitions]
        if tracks is None or isinstance(tracks, int):
            k = tracks if isinstance(tracks, int) else len(transitions[0][1])
            tracks = derive_tracks(transitions, k, pads)
        return cls(tracks, n_states, initial, accepting, transitions, check=False)

    @property
    def arity(self) -> int:
        return len(self.tracks)

    def out(self, q: int):
        """Outgoing ``(symbol, target, transition_index)`` triples of ``q``."""
        return self._out[q]

    def successors(self, q: int, symbol: tuple):
        return self._by_sym[q].get(symbol, ())

    def symbols_used(self) -> set:
        return {a for _, a, _ in self.transitions}

    def is_deterministic(self) -> bool:
        if len(self.initial) > 1:
            return False
        return all(len(v) <= 1 for d in self._by_sym for v in d.values())

    def with_tracks(self, tracks: Sequence[TrackAlphabet]) -> "BuchiAutomaton":
        return BuchiAutomaton(tracks, self.n_states, self.initial, self.accepting,
                              self.transitions, check=False)

    def __repr__(self):
        return (f"BuchiAutomaton(tracks={self.arity}, states={self.n_states}, "
                f"transitions={len(self.transitions)})")


def derive_tracks(transitions, k: int, pads=None) -> tuple:
    seen = [dict() for _ in range(k)]
    for _, a, _ in transitions:
        for i, c in enumerate(a):
            seen[i][c] = None
    out = []
    for i in range(k):
        pad = pads[i] if pads else None
        syms = list(seen[i])
        if pad is not None and pad not in seen[i]:
            syms.append(pad)
        if not syms:
            syms = [pad if pad is not None else PAD]
        out.append(TrackAlphabet(tuple(syms), pad if pad in syms else None))
    return tuple(out)


def merge_tracks(t0: Sequence[TrackAlphabet], t1: Sequence[TrackAlphabet]) -> tuple:
    if len(t0) != len(t1):
        raise AlphabetMismatch(f"track counts differ: {len(t0)} vs {len(t1)}")
    return tuple(a.union(b) for a, b in zip(t0, t1))


def empty_automaton(tracks: Sequence[TrackAlphabet]) -> BuchiAutomaton:
    return BuchiAutomaton(tracks, 0, (), (), ())


def universal_automaton(tracks: Sequence[TrackAlphabet]) -> BuchiAutomaton:
    """One accepting state looping on every symbol of the product alphabet."""
    syms = product(*(t.symbols for t in tracks))
    return BuchiAutomaton(tracks, 1, (0,), (0,), [(0, a, 0) for a in syms], check=False)


def lasso_automaton(w: LassoWord, tracks: Sequence[TrackAlphabet] | None = None) -> BuchiAutomaton:
    """Deterministic automaton accepting exactly the single word ``w``."""
    n = w.positions()
    trans = [(i, w[i], w.next_position(i)) for i in range(n)]
    if tracks is None:
        return BuchiAutomaton.build(n, (0,), range(n), trans, tracks=w.tracks)
    return BuchiAutomaton(tracks, n, (0,), range(n), trans, check=False)


def words_automaton(words: Sequence[LassoWord], tracks: Sequence[TrackAlphabet] | None = None) -> BuchiAutomaton:
    """Deterministic automaton for a finite set of lasso words.

    A state is the set of (word, position) pairs still consistent with the
    input read so far; every state is accepting, since an infinite run keeps
    some word alive forever.
    """
    words = list(dict.fromkeys(words))
    if tracks is None:
        k = words[0].tracks if words else 1
    else:
        k = len(tracks)
    if not words:
        return BuchiAutomaton(tracks if tracks is not None else derive_tracks([], k), 0, (), (), ())
    start = frozenset((i, 0) for i in range(len(words)))
    ids = {start: 0}
    order = [start]
    trans = []
    j = 0
    while j < len(order):
        by_sym: dict = {}
        for i, pos in order[j]:
            by_sym.setdefault(words[i][pos], set()).add((i, words[i].next_position(pos)))
        for a in sorted(by_sym, key=repr):
            nxt = frozenset(by_sym[a])
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            trans.append((j, a, ids[nxt]))
        j += 1
    n = len(order)
    if tracks is None:
        return BuchiAutomaton.build(n, (0,), range(n), trans, tracks=k)
    return BuchiAutomaton(tracks, n, (0,), range(n), trans, check=False)


# ---------------------------------------------------------------- graph utils

def tarjan(roots: Iterable, succ) -> list[list]:
    """Strongly connected components reachable from ``roots`` (iterative)."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    comps: list[list] = []
    counter = 0
    for root in roots:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    x = stack.pop()
                    on_stack.discard(x)
                    comp.append(x)
                    if x == v:
                        break
                comps.append(comp)
    return comps


def _nontrivial(comp: list, succ) -> bool:
    if len(comp) > 1:
        return True
    v = comp[0]
    return v in set(succ(v))


def has_accepting_cycle(roots, succ, accepting) -> bool:
    for comp in tarjan(roots, succ):
        if any(accepting(v) for v in comp) and _nontrivial(comp, succ):
            return True
    return False


# ------------------------------------------------------------ basic algebra

def disjoint_union(m0: BuchiAutomaton, m1: BuchiAutomaton) -> BuchiAutomaton:
    """``M0 (+) M1``: run counts add up word by word."""
    tracks = merge_tracks(m0.tracks, m1.tracks)
    off = m0.n_states
    trans = list(m0.transitions) + [(p + off, a, q + off) for p, a, q in m1.transitions]
    return BuchiAutomaton(tracks, m0.n_states + m1.n_states,
                          set(m0.initial) | {q + off for q in m1.initial},
                          set(m0.accepting) | {q + off for q in m1.accepting},
                          trans, check=False)


def union_all(automata: Sequence[BuchiAutomaton]) -> BuchiAutomaton:
    result = automata[0]
    for m in automata[1:]:
        result = disjoint_union(result, m)
    return result


def flag_intersection(m0: BuchiAutomaton, m1: BuchiAutomaton) -> BuchiAutomaton:
    """Flag (Choueka) product on ``Q0 x Q1 x {0,1}``.

    State ``(p0, p1, m)`` is numbered ``2*(p0*|Q1| + p1) + m``.  The flag
    ``m`` names the factor whose accepting state is awaited; it toggles when
    that factor sits in an accepting state.  Accepting runs of the product
    are in bijection with pairs of accepting runs of the factors.
    """
    tracks = merge_tracks(m0.tracks, m1.tracks)
    n1 = m1.n_states
    f = (m0.accepting, m1.accepting)

    def idx(p0, p1, m):
        return 2 * (p0 * n1 + p1) + m

    trans = []
    for p0 in range(m0.n_states):
        for a, q0, _ in m0.out(p0):
            for p1 in range(n1):
                for q1 in m1.successors(p1, a):
                    for m in (0, 1):
                        pm = p0 if m == 0 else p1
                        nxt = 1 - m if pm in f[m] else m
                        trans.append((idx(p0, p1, m), a, idx(q0, q1, nxt)))
    initial = [idx(p0, p1, 0) for p0 in m0.initial for p1 in m1.initial]
    accepting = [idx(p0, p1, 0) for p0 in m0.accepting for p1 in range(n1)]
    return BuchiAutomaton(tracks, 2 * m0.n_states * n1, initial, accepting, trans, check=False)


def alphabet_expand(extra: TrackAlphabet, m: BuchiAutomaton) -> BuchiAutomaton:
    """``Sigma^omega (x) M``: new first track, transitions copied per symbol."""
    trans = [(p, (s,) + a, q) for p, a, q in m.transitions for s in extra.symbols]
    return BuchiAutomaton((extra,) + m.tracks, m.n_states, m.initial, m.accepting,
                          trans, check=False)


def project(m: BuchiAutomaton, drop_track: int) -> BuchiAutomaton:
    """Existential projection removing track ``drop_track`` (0-based)."""
    if m.arity < 1:
        raise ArityMismatch("cannot project a 0-track automaton")
    if not 0 <= drop_track < m.arity:
        raise IndexError(f"track {drop_track} out of range for {m.arity} tracks")
    tracks = m.tracks[:drop_track] + m.tracks[drop_track + 1:]
    trans = [(p, a[:drop_track] + a[drop_track + 1:], q) for p, a, q in m.transitions]
    return BuchiAutomaton(tracks, m.n_states, m.initial, m.accepting, trans, check=False)


def map_symbols(m: BuchiAutomaton, fn, tracks: Sequence[TrackAlphabet] | int) -> BuchiAutomaton:
    """Relabel every transition symbol through ``fn`` (must return a tuple)."""
    trans = [(p, fn(a), q) for p, a, q in m.transitions]
    if isinstance(tracks, int):
        return BuchiAutomaton.build(m.n_states, m.initial, m.accepting, trans, tracks=tracks)
    return BuchiAutomaton(tracks, m.n_states, m.initial, m.accepting, trans, check=False)


def pack(m: BuchiAutomaton) -> BuchiAutomaton:
    """k tracks -> 1 track whose atoms are the k-tuples."""
    return map_symbols(m, lambda a: (a,), 1)


def unpack(m: BuchiAutomaton, k: int) -> BuchiAutomaton:
    """Inverse of :func:`pack`; ``k`` is the inner track count."""
    return map_symbols(m, lambda a: tuple(a[0]), k)


def permute_tracks(m: BuchiAutomaton, order: Sequence[int]) -> BuchiAutomaton:
    """New track ``j`` is old track ``order[j]``."""
    tracks = tuple(m.tracks[i] for i in order)
    return map_symbols(m, lambda a: tuple(a[i] for i in order), tracks)


def restrict_initial(m: BuchiAutomaton, initial: Iterable[int]) -> BuchiAutomaton:
    return BuchiAutomaton(m.tracks, m.n_states, initial, m.accepting, m.transitions, check=False)


# ------------------------------------------------------ membership, emptiness

def member(m: BuchiAutomaton, w: LassoWord) -> bool:
    """Decide ``w in L(M)`` on the product of M with the lasso shape of w."""
    if w.tracks != m.arity:
        raise ArityMismatch(f"word has {w.tracks} tracks, automaton {m.arity}")

    def succ(node):
        q, pos = node
        nxt = w.next_position(pos)
        return [(q2, nxt) for q2 in m.successors(q, w[pos])]

    return has_accepting_cycle([(q, 0) for q in sorted(m.initial)], succ,
                               lambda node: node[0] in m.accepting)


def emptiness(m: BuchiAutomaton) -> bool:
    """True iff ``L(M)`` is empty (no reachable accepting cycle)."""
    succ = lambda q: [t for _, t, _ in m.out(q)]
    return not has_accepting_cycle(sorted(m.initial), succ, lambda q: q in m.accepting)


def reachable(m: BuchiAutomaton) -> set:
    seen = set(m.initial)
    todo = list(seen)
    while todo:
        p = todo.pop()
        for _, q, _ in m.out(p):
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def useful_states(m: BuchiAutomaton) -> set:
    """States lying on some accepting run (reachable and productive)."""
    succ = lambda q: [t for _, t, _ in m.out(q)]
    comps = tarjan(sorted(m.initial), succ)
    reach = {v for c in comps for v in c}
    good = set()
    for comp in comps:
        if any(v in m.accepting for v in comp) and _nontrivial(comp, succ):
            good.update(comp)
    pred = defaultdict(list)
    for p, _, q in m.transitions:
        if p in reach:
            pred[q].append(p)
    todo = list(good)
    productive = set(good)
    while todo:
        q = todo.pop()
        for p in pred[q]:
            if p not in productive:
                productive.add(p)
                todo.append(p)
    return reach & productive


def subautomaton(m: BuchiAutomaton, keep: Iterable[int]) -> BuchiAutomaton:
    keep = sorted(set(keep))
    ren = {q: i for i, q in enumerate(keep)}
    trans = [(ren[p], a, ren[q]) for p, a, q in m.transitions if p in ren and q in ren]
    return BuchiAutomaton(m.tracks, len(keep), [ren[q] for q in m.initial if q in ren],
                          [ren[q] for q in m.accepting if q in ren], trans, check=False)


def trim(m: BuchiAutomaton) -> BuchiAutomaton:
    """Drop states on no accepting run.  Language and run counts unchanged."""
    return subautomaton(m, useful_states(m))


def bisimulation_reduce(m: BuchiAutomaton) -> BuchiAutomaton:
    """Trim, then quotient by forward bisimulation (language preserving).

    Worklist partition refinement: after a split only the predecessors of
    states that changed block are re-examined.
    """
    m = trim(m)
    n = m.n_states
    if n == 0:
        return m
    sym_ids: dict = {}
    out = [[] for _ in range(n)]
    pred = [[] for _ in range(n)]
    for p, a, q in m.transitions:
        out[p].append((sym_ids.setdefault(a, len(sym_ids)), q))
        pred[q].append(p)
    acc = m.accepting
    kinds = sorted({q in acc for q in range(n)})
    block = [kinds.index(q in acc) for q in range(n)]
    members = [set() for _ in kinds]
    for q in range(n):
        members[block[q]].add(q)
    dirty = set(range(n))
    while dirty:
        by_block = defaultdict(list)
        for q in dirty:
            by_block[block[q]].append(q)
        sig = {q: frozenset((a, block[t]) for a, t in out[q]) for q in dirty}
        # signature shared by the clean members of a block (unchanged since last split)
        clean = {}
        for b, qs in by_block.items():
            if len(qs) < len(members[b]):
                rep = next(q for q in members[b] if q not in dirty)
                clean[b] = frozenset((a, block[t]) for a, t in out[rep])
        moved = []
        for b, qs in by_block.items():
            groups = defaultdict(list)
            for q in qs:
                groups[sig[q]].append(q)
            mem = members[b]
            if b in clean:
                groups.pop(clean[b], None)  # these stay with the clean members
                keep = None
            else:
                keep = max(groups, key=lambda g: len(groups[g]))
            for g, qs_g in groups.items():
                if g == keep:
                    continue
                nb = len(members)
                members.append(set(qs_g))
                mem.difference_update(qs_g)
                for q in qs_g:
                    block[q] = nb
                moved.extend(qs_g)
        dirty = {p for q in moved for p in pred[q]}
    nblocks = len(members)
    trans = {(block[p], a, block[q]) for p, a, q in m.transitions}
    return BuchiAutomaton(m.tracks, nblocks, {block[q] for q in m.initial},
                          {block[q] for q in m.accepting}, sorted(trans, key=repr), check=False)


def merge_initials(m: BuchiAutomaton) -> BuchiAutomaton:
    """Collapse several initial states into one fresh start state.

    Only applied when no transition re-enters an initial state, so the
    start state is visited exactly once and its acceptance is irrelevant.
    """
    if len(m.initial) <= 1 or any(q in m.initial for _, _, q in m.transitions):
        return m
    s = m.n_states
    trans = list(m.transitions) + [(s, a, q) for p in m.initial for a, q, _ in m.out(p)]
    return BuchiAutomaton(m.tracks, s + 1, (s,), m.accepting, trans, check=False)


# ------------------------------------------------------------ run languages

def run_language(m: BuchiAutomaton, w: LassoWord) -> BuchiAutomaton:
    """1-track automaton over transition indices accepting the accepting runs of M on w.

    The letter ``(i,)`` stands for ``m.transitions[i]``.  The result is
    deterministic: a run letter fixes the next state of M.
    """
    if w.tracks != m.arity:
        raise ArityMismatch(f"word has {w.tracks} tracks, automaton {m.arity}")
    npos = w.positions()
    start = m.n_states * npos
    trans = []
    for q in range(m.n_states):
        for pos in range(npos):
            sym = w[pos]
            nxt = w.next_position(pos)
            for a, q2, i in m.out(q):
                if a == sym:
                    trans.append((q * npos + pos, (i,), q2 * npos + nxt))
                    if pos == 0 and q in m.initial:
                        trans.append((start, (i,), q2 * npos + nxt))
    accepting = [q * npos + p for q in m.accepting for p in range(npos)]
    tracks = (TrackAlphabet(tuple(range(max(1, len(m.transitions))))),)
    res = BuchiAutomaton(tracks, start + 1, (start,), accepting, trans, check=False)
    return trim(res)


def decode_run(m: BuchiAutomaton, run: LassoWord) -> LassoWord:
    """Turn a run over transition indices into a lasso of transition triples."""
    t = m.transitions
    return LassoWord([(t[s[0]],) for s in run.prefix], [(t[s[0]],) for s in run.period])


def find_member(m: BuchiAutomaton) -> LassoWord | None:
    """Some lasso word accepted by M, or None when L(M) is empty."""
    succ = lambda q: [t for _, t, _ in m.out(q)]
    target = None
    for comp in tarjan(sorted(m.initial), succ):
        if _nontrivial(comp, succ):
            acc = [q for q in comp if q in m.accepting]
            if acc:
                target = (min(acc), set(comp))
                break
    if target is None:
        return None
    q0, comp = target

    def path(sources, goal, allowed):
        # breadth-first search for a symbol path from any source to goal
        prev = {s: None for s in sources}
        frontier = list(sources)
        while frontier:
            nxt = []
            for p in frontier:
                for a, t, _ in m.out(p):
                    if allowed is not None and t not in allowed:
                        continue
                    if t not in prev:
                        prev[t] = (p, a)
                        nxt.append(t)
            frontier = nxt
        seq = []
        node = goal
        while prev.get(node) is not None:
            p, a = prev[node]
            seq.append(a)
            node = p
        return seq[::-1]

    prefix = path(sorted(m.initial), q0, None) if q0 not in m.initial else []
    # cycle through q0 inside its component
    best = None
    for a, t, _ in m.out(q0):
        if t not in comp:
            continue
        rest = [] if t == q0 else path([t], q0, comp)
        if best is None or len(rest) + 1 < len(best):
            best = [a] + rest
    return LassoWord(prefix, best)
