"""Synchronised products of many automata over shared global tracks.

Explicit factors contribute their transitions; the product symbol is the
join of the factor symbols on the tracks they share.  Lazy factors (simple
predicates such as track equality) only filter or annotate joined symbols.
Acceptance is the conjunction of all factor acceptance conditions, turned
into a single Buchi condition with a deterministic round-robin counter, so
accepting runs of the product correspond one-to-one to tuples of accepting
runs of the factors.
"""

from __future__ import annotations

from collections import defaultdict
from itertools import product as cartesian
from typing import Sequence

from .automata import (BuchiAutomaton, TrackAlphabet, _check_budget, derive_tracks)
from .lasso import PAD


class LazyFactor:
    """A factor whose transitions are computed on demand.

    ``tracks`` lists the global track indices read by the factor.
    ``step(state, parts)`` returns the successor states on the symbol whose
    components on those tracks are ``parts``.
    """

    tracks: tuple = ()
    trivial_acceptance = True

    def initial(self):
        return (0,)

    def step(self, state, parts):
        raise NotImplementedError

    def accepting(self, state) -> bool:
        return True


class Equal(LazyFactor):
    def __init__(self, i: int, j: int):
        self.tracks = (i, j)

    def step(self, state, parts):
        return (0,) if parts[0] == parts[1] else ()


class Distinct(LazyFactor):
    """Tracks ``i`` and ``j`` carry different omega-words."""

    trivial_acceptance = False

    def __init__(self, i: int, j: int):
        self.tracks = (i, j)

    def step(self, state, parts):
        if state == 1 or parts[0] != parts[1]:
            return (1,)
        return (0,)

    def accepting(self, state):
        return state == 1


class LexLess(LazyFactor):
    """Track ``i`` is lexicographically smaller than track ``j``.

    ``order`` maps atoms to sort keys (default: ``repr``).
    """

    trivial_acceptance = False

    def __init__(self, i: int, j: int, order=None):
        self.tracks = (i, j)
        self.key = order or repr

    def step(self, state, parts):
        if state == 1:
            return (1,)
        a, b = parts
        if a == b:
            return (0,)
        return (1,) if self.key(a) < self.key(b) else ()

    def accepting(self, state):
        return state == 1


class Padded(LazyFactor):
    """Track ``i`` has the shape ``(Sigma \\ PAD)* PAD^omega``."""

    def __init__(self, i: int, pad=PAD):
        self.tracks = (i,)
        self.pad = pad

    def step(self, state, parts):
        is_pad = parts[0] == self.pad
        if state == 1:
            return (1,) if is_pad else ()
        return (1,) if is_pad else (0,)

    def accepting(self, state):
        return state == 1

    trivial_acceptance = False


class ConstantTrack(LazyFactor):
    """Track ``i`` carries the atom sequence of a fixed lasso word."""

    def __init__(self, i: int, word):
        self.tracks = (i,)
        self.word = word

    def step(self, state, parts):
        if self.word[state][0] == parts[0]:
            return (self.word.next_position(state),)
        return ()


def conjoin(ntracks: int, explicit: Sequence[tuple[BuchiAutomaton, Sequence[int]]],
            lazy: Sequence[LazyFactor] = (), budget: int | None = None,
            tracks: Sequence[TrackAlphabet] | None = None,
            pads: Sequence | None = None) -> BuchiAutomaton:
    """Product of ``explicit`` factors ``(automaton, global_tracks)`` and ``lazy`` ones.

    Every global track must be read by at least one explicit factor.  A
    factor with an empty track list (a 0-track automaton, i.e. a sentence)
    runs on the constant symbol ``()``.
    """
    explicit = [(m, tuple(t)) for m, t in explicit]
    lazy = list(lazy)
    covered = set()
    for m, tr in explicit:
        if m.arity != len(tr):
            raise ValueError(f"factor with {m.arity} tracks mapped onto {len(tr)}")
        covered.update(tr)
    if covered != set(range(ntracks)):
        raise ValueError(f"tracks {sorted(set(range(ntracks)) - covered)} not covered")
    for f in lazy:
        if not set(f.tracks) <= covered:
            raise ValueError("lazy factor reads an uncovered track")

    # Order explicit factors so that shared tracks are joined by index lookup.
    plan = []
    repeats = []
    assigned: set = set()
    for m, tr in explicit:
        first = {}
        dup = []
        for j, t in enumerate(tr):
            if t in first:
                dup.append((first[t], j))
            else:
                first[t] = j
        shared = [j for t, j in first.items() if t in assigned]
        fresh = [j for t, j in first.items() if t not in assigned]
        plan.append((m, tr, shared, fresh))
        repeats.append(dup)
        assigned.update(tr)
    caches = [dict() for _ in plan]

    def indexed(fi, q):
        cache = caches[fi]
        if q not in cache:
            m, tr, shared, _ = plan[fi]
            dup = repeats[fi]
            d = defaultdict(list)
            for a, t, _ in m.out(q):
                if all(a[i] == a[j] for i, j in dup):
                    d[tuple(a[j] for j in shared)].append((a, t))
            cache[q] = d
        return cache[q]

    # Acceptance components: explicit factors always, lazy ones if nontrivial.
    acc_parts = [("e", i) for i in range(len(explicit))]
    acc_parts += [("l", i) for i, f in enumerate(lazy) if not f.trivial_acceptance]
    k = len(acc_parts)

    def comp_accepting(part, qs, ls):
        kind, i = part
        if kind == "e":
            return qs[i] in explicit[i][0].accepting
        return lazy[i].accepting(ls[i])

    ids: dict = {}
    order: list = []

    def intern(state):
        if state not in ids:
            ids[state] = len(order)
            order.append(state)
            if len(order) % 4096 == 0:
                _check_budget(len(order), budget, "product")
        return ids[state]

    starts = [tuple(qs) + tuple(ls) for qs in cartesian(*(sorted(m.initial) for m, _ in explicit))
              for ls in cartesian(*(tuple(f.initial()) for f in lazy))]
    ne = len(explicit)
    initial = [intern((s, 0)) for s in starts]
    trans = []
    i = 0
    while i < len(order):
        state, c = order[i]
        qs, ls = state[:ne], state[ne:]
        if k:
            c2 = (c + 1) % k if comp_accepting(acc_parts[c], qs, ls) else c
        else:
            c2 = 0
        partial = [((None,) * ntracks, ())]
        for fi, (m, tr, shared, fresh) in enumerate(plan):
            idx = indexed(fi, qs[fi])
            nxt = []
            for assign, succ in partial:
                key = tuple(assign[tr[j]] for j in shared)
                for a, t in idx.get(key, ()):
                    if fresh:
                        lst = list(assign)
                        for j in fresh:
                            lst[tr[j]] = a[j]
                        nxt.append((tuple(lst), succ + (t,)))
                    else:
                        nxt.append((assign, succ + (t,)))
            partial = nxt
            if not partial:
                break
        for sym, succ in partial:
            lazy_succ = []
            for f, st in zip(lazy, ls):
                options = f.step(st, tuple(sym[t] for t in f.tracks))
                if not options:
                    break
                lazy_succ.append(options)
            else:
                for combo in cartesian(*lazy_succ):
                    trans.append((i, sym, intern((succ + tuple(combo), c2))))
        i += 1
    _check_budget(len(order), budget, "product")

    accepting = []
    for j, (state, c) in enumerate(order):
        if k == 0 or (c == 0 and comp_accepting(acc_parts[0], state[:ne], state[ne:])):
            accepting.append(j)
    if tracks is None:
        if pads is None:
            pads = [None] * ntracks
            for m, tr in explicit:
                for j, t in enumerate(tr):
                    if m.tracks[j].pad is not None:
                        pads[t] = m.tracks[j].pad
        tracks = derive_tracks(trans, ntracks, pads)
    return BuchiAutomaton(tracks, len(order), initial, accepting, trans, check=False)


def intersect(*automata: BuchiAutomaton, budget: int | None = None) -> BuchiAutomaton:
    """Conjunction of automata over the same tracks."""
    k = automata[0].arity
    return conjoin(k, [(m, range(k)) for m in automata], budget=budget)


def cylindrify(m: BuchiAutomaton, ntracks: int, placement: Sequence[int],
               filler: Sequence[BuchiAutomaton]) -> BuchiAutomaton:
    """Put ``m`` on global tracks ``placement``; the remaining tracks are
    covered by 1-track ``filler`` automata (one per remaining track, in order).
    """
    rest = [t for t in range(ntracks) if t not in set(placement)]
    explicit = [(m, placement)] + [(f, (t,)) for f, t in zip(filler, rest)]
    return conjoin(ntracks, explicit)
