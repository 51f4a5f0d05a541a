"""Closure constructions on injective presentations.

Disjoint union, the aleph_0-power (``$* (x) L``), the continuum power
(``{$1,$2}^omega (x) L``) and the unfolding of a finite-height dag into a
forest of root-started paths.  All new symbols are packed into compound
atoms so every presentation keeps a single-track domain.
"""

from __future__ import annotations

from .automata import (BuchiAutomaton, TrackAlphabet, bisimulation_reduce, disjoint_union,
                       emptiness, lasso_automaton, words_automaton, map_symbols, project, trim, union_all)
from .lasso import PAD, LassoWord, convolve
from .parity import difference
from .presentation import Presentation
from .product import conjoin

DOLLAR = "$"
DOLLAR1 = "$1"
DOLLAR2 = "$2"
VOID = "∅"  # marks absent path components in unfoldings


class ConstructionError(ValueError):
    pass


def finite_structure(elements, relations: dict | None = None) -> Presentation:
    """Presentation of a finite structure whose elements are given lasso words.

    ``relations`` maps a name to ``(arity, tuples)``; every tuple lists
    elements.  Elements may be strings, which are read as ``u PAD^omega``.
    """
    def word(e):
        return e if isinstance(e, LassoWord) else LassoWord.finite(e)

    elems = [word(e) for e in elements]
    atoms = tuple(dict.fromkeys(s[0] for w in elems for s in w.prefix + w.period))
    track = TrackAlphabet(atoms, PAD if PAD in atoms else None)

    def language(words, k):
        return bisimulation_reduce(words_automaton(words, (track,) * k))

    rels = {}
    for name, (k, tuples) in (relations or {}).items():
        tuples = [tuple(word(e) for e in t) for t in tuples]
        for t in tuples:
            if len(t) != k or any(e not in elems for e in t):
                raise ConstructionError(f"bad tuple in {name}: {t}")
        rels[name] = (k, language([convolve(t) for t in dict.fromkeys(tuples)], k))
    return Presentation(track, language(list(dict.fromkeys(elems)), 1), None, rels, True)


def _require_injective(p: Presentation, what: str):
    if not p.injective or not p.identity:
        raise ConstructionError(f"{what} needs an injective presentation with identity equality")


def _pairs_alphabet(tags, alphabet: TrackAlphabet) -> TrackAlphabet:
    return TrackAlphabet(tuple((t, a) for t in tags for a in alphabet.symbols))


def _tag_relation(auto: BuchiAutomaton, tag) -> BuchiAutomaton:
    return map_symbols(auto, lambda s: tuple((tag, c) for c in s), auto.arity)


def tag_presentation(p: Presentation, tag) -> Presentation:
    """Rename every atom ``a`` to ``(tag, a)``; an isomorphic copy."""
    return Presentation(_pairs_alphabet([tag], p.alphabet), _tag_relation(p.domain, tag), None,
                        {n: (k, _tag_relation(a, tag)) for n, (k, a) in p.relations.items()},
                        p.injective)


def disjoint_union_presentation(p1: Presentation, p2: Presentation) -> Presentation:
    """Presentation of the disjoint union; tags both sides if domains overlap."""
    _require_injective(p1, "disjoint union")
    _require_injective(p2, "disjoint union")
    overlap = conjoin(1, [(p1.domain, (0,)), (p2.domain, (0,))])
    if not emptiness(overlap):
        p1, p2 = tag_presentation(p1, 1), tag_presentation(p2, 2)
    alphabet = p1.alphabet.union(p2.alphabet)
    rels = {}
    for name in sorted(set(p1.relations) | set(p2.relations)):
        parts = [p.relations[name] for p in (p1, p2) if name in p.relations]
        if len({k for k, _ in parts}) > 1:
            raise ConstructionError(f"relation {name} has different arities")
        auto = parts[0][1] if len(parts) == 1 else disjoint_union(parts[0][1], parts[1][1])
        rels[name] = (parts[0][0], auto)
    return Presentation(alphabet, disjoint_union(p1.domain, p2.domain), None, rels, True)


def _shape_dollar_star() -> BuchiAutomaton:
    """``$* PAD^omega`` on one track."""
    return BuchiAutomaton.build(2, (0,), (1,), [(0, (DOLLAR,), 0), (0, (PAD,), 1), (1, (PAD,), 1)],
                                tracks=[TrackAlphabet((DOLLAR, PAD), PAD)])


def _free_shape() -> BuchiAutomaton:
    return BuchiAutomaton.build(1, (0,), (0,), [(0, (DOLLAR1,), 0), (0, (DOLLAR2,), 0)], tracks=1)


def _power(p: Presentation, shape: BuchiAutomaton, tags) -> Presentation:
    def lift(auto: BuchiAutomaton) -> BuchiAutomaton:
        k = auto.arity
        # tracks 0..k-1: original; track k: the shared copy index
        prod = trim(conjoin(k + 1, [(auto, range(k)), (shape, (k,))]))
        return map_symbols(prod, lambda s: tuple((s[k], c) for c in s[:k]), k)

    rels = {n: (k, lift(a)) for n, (k, a) in p.relations.items()}
    return Presentation(_pairs_alphabet(tags, p.alphabet), lift(p.domain), None, rels, True)


def power_aleph0(p: Presentation) -> Presentation:
    """Countably many disjoint copies, indexed by ``$^i PAD^omega``."""
    _require_injective(p, "power_aleph0")
    return _power(p, _shape_dollar_star(), (DOLLAR, PAD))


def power_continuum(p: Presentation) -> Presentation:
    """Continuum many disjoint copies, indexed by ``{$1,$2}^omega``."""
    _require_injective(p, "power_continuum")
    return _power(p, _free_shape(), (DOLLAR1, DOLLAR2))


def copy_slice(p: Presentation, index: LassoWord) -> Presentation:
    """The copy of a power presentation selected by a fixed index word.

    Atoms keep their index component; :func:`strip_copy` removes it.
    """
    def anchor(auto: BuchiAutomaton) -> BuchiAutomaton:
        k = auto.arity
        idx = lasso_automaton(index)
        lifted = map_symbols(auto, lambda s: tuple(c for pair in s for c in pair), 2 * k)
        explicit = [(lifted, range(2 * k))] + [(idx, (2 * j,)) for j in range(k)]
        prod = trim(conjoin(2 * k, explicit))
        return map_symbols(prod, lambda s: tuple((s[2 * j], s[2 * j + 1]) for j in range(k)), k)

    rels = {n: (k, anchor(a)) for n, (k, a) in p.relations.items()}
    return Presentation(p.alphabet, anchor(p.domain), None, rels, True)


def strip_copy(p: Presentation) -> Presentation:
    """Drop the copy index of every atom (meaningful after :func:`copy_slice`)."""
    def strip(auto):
        return map_symbols(auto, lambda s: tuple(c[1] for c in s), auto.arity)

    syms = tuple(dict.fromkeys(a[1] for a in p.alphabet.symbols))
    return Presentation(TrackAlphabet(syms), strip(p.domain), None,
                        {n: (k, strip(a)) for n, (k, a) in p.relations.items()}, True)


# ----------------------------------------------------------------- unfolding

def roots_automaton(p: Presentation, edge: str = "E", budget=None) -> BuchiAutomaton:
    """Domain elements without an incoming edge."""
    e = p.relation(edge)
    children = project(trim(conjoin(2, [(e, (0, 1)), (p.domain, (0,)), (p.domain, (1,))],
                                    budget=budget)), 0)
    return trim(difference(p.domain, children, budget=budget))


def _void_track() -> BuchiAutomaton:
    return BuchiAutomaton.build(1, (0,), (0,), [(0, (VOID,), 0)], tracks=1)


def unfold_dag(p: Presentation, k: int, roots: BuchiAutomaton | None = None, edge: str = "E",
               budget=None) -> Presentation:
    """Forest of root-started E-paths of at most ``k`` edges.

    A path ``c0 .. cm`` is the convolution of its nodes, padded with the
    reserved ``VOID`` atom up to ``k+1`` components and packed into one
    track.  ``roots`` defaults to the elements without a parent.
    """
    _require_injective(p, "unfold_dag")
    if roots is None:
        roots = roots_automaton(p, edge, budget)
    e = p.relation(edge)
    e_dom = trim(conjoin(2, [(e, (0, 1)), (p.domain, (1,))], budget=budget))
    width = k + 1
    layers = []
    for m in range(width):
        explicit = [(roots, (0,))] + [(e_dom, (i, i + 1)) for i in range(m)]
        explicit += [(_void_track(), (i,)) for i in range(m + 1, width)]
        layers.append(bisimulation_reduce(conjoin(width, explicit, budget=budget)))
    atoms = tuple(dict.fromkeys(s for layer in layers for _, s, _ in layer.transitions))
    track = TrackAlphabet(atoms or ((VOID,) * width,))
    packed = [map_symbols(layer, lambda s: (s,), (track,)) for layer in layers]
    domain = bisimulation_reduce(union_all(packed))
    edges = []
    for m in range(1, width):
        def parent_child(s, m=m):
            parent = s[:m] + (VOID,) * (width - m)
            return (parent, s)
        edges.append(map_symbols(layers[m], parent_child, (track, track)))
    if edges:
        e_new = union_all(edges)
    else:
        e_new = BuchiAutomaton((track, track), 0, (), (), ())
    return Presentation(track, domain, None, {edge: (2, bisimulation_reduce(e_new))}, True)


def root_path(root: LassoWord, k: int) -> LassoWord:
    """The unfolding node of the one-element path ``root``."""
    return LassoWord([((a[0],) + (VOID,) * k,) for a in root.prefix],
                     [((a[0],) + (VOID,) * k,) for a in root.period])


def descendants(p: Presentation, root: LassoWord | BuchiAutomaton, height: int, edge: str = "E",
                budget=None) -> BuchiAutomaton:
    """Automaton for ``root`` and all nodes at most ``height`` edges below it."""
    e = bisimulation_reduce(conjoin(2, [(p.relation(edge), (0, 1)), (p.domain, (1,))],
                                    budget=budget))
    level = root if isinstance(root, BuchiAutomaton) else lasso_automaton(root, p.domain.tracks)
    layers = [level]
    for _ in range(height):
        level = bisimulation_reduce(project(conjoin(2, [(level, (0,)), (e, (0, 1))],
                                                    budget=budget), 0))
        if emptiness(level):
            break
        layers.append(level)
    return bisimulation_reduce(union_all(layers))


def restrict(p: Presentation, domain: BuchiAutomaton, budget=None) -> Presentation:
    """Induced substructure on ``L(domain) & L(p.domain)``."""
    new_dom = bisimulation_reduce(conjoin(1, [(p.domain, (0,)), (domain, (0,))], budget=budget))
    rels = {}
    for name, (k, auto) in p.relations.items():
        explicit = [(auto, range(k))] + [(new_dom, (i,)) for i in range(k)]
        rels[name] = (k, bisimulation_reduce(conjoin(k, explicit, budget=budget)))
    eq = p.equality
    if eq is not None:
        eq = trim(conjoin(2, [(eq, (0, 1)), (new_dom, (0,)), (new_dom, (1,))], budget=budget))
    return Presentation(p.alphabet, new_dom, eq, rels, p.injective)


def subtree(p: Presentation, root: LassoWord, height: int, edge: str = "E",
            budget=None) -> Presentation:
    """Subtree presentation below ``root`` (forest of height <= ``height``)."""
    return restrict(p, descendants(p, root, height, edge, budget), budget)


def path_root(atom):
    """Letterwise map from an unfolding node to the node of its root path."""
    return (atom[0],) + (VOID,) * (len(atom) - 1)


def copy_root(inner):
    """Lift a letterwise root map to power copies ``(index, atom)``."""
    return lambda atom: (atom[0], inner(atom[1]))


def pair_root(atom):
    """Root map of :func:`unfold_over_forest` nodes ``(r, y)``."""
    return (atom[0], VOID)


def preimage(m: BuchiAutomaton, track: int, fn, symbols) -> BuchiAutomaton:
    """Replace every letter ``c`` on ``track`` by each ``b`` in ``symbols`` with ``fn(b) == c``."""
    by_image: dict = {}
    for b in symbols:
        by_image.setdefault(fn(b), []).append(b)
    trans = [(p, a[:track] + (b,) + a[track + 1:], q) for p, a, q in m.transitions
             for b in by_image.get(a[track], ())]
    tracks = list(m.tracks)
    tracks[track] = TrackAlphabet(tuple(symbols))
    return BuchiAutomaton(tracks, m.n_states, m.initial, m.accepting, trans, check=False)


def unfold_over_forest(roots: BuchiAutomaton, root_edges: BuchiAutomaton, forest: Presentation,
                       root_of, budget=None) -> Presentation:
    """Unfolding of the dag ``roots + forest`` where only the roots share children.

    ``root_edges`` relates new roots to roots of ``forest``; ``root_of`` maps
    each atom of a forest node to the atom of its root at the same position.
    Below a new root ``r`` every forest node ``y`` has a unique path, fixed by
    ``r`` and ``y``, so the node is encoded as the atom pairs ``(r, y)``; the
    root itself is ``(r, VOID)``.  Use :func:`pair_root` as the root map of the
    result.
    """
    _require_injective(forest, "unfold_over_forest")
    symbols = forest.domain.tracks[0].symbols
    below = preimage(root_edges, 1, root_of, symbols)
    # the domain goes first so that the expanded preimage is only looked up
    deep = trim(conjoin(2, [(forest.domain, (1,)), (below, (0, 1))], budget=budget))
    top = map_symbols(roots, lambda s: ((s[0], VOID),), 1)
    nodes = map_symbols(deep, lambda s: ((s[0], s[1]),), 1)
    atoms = tuple(dict.fromkeys(s for m in (top, nodes) for _, (s,), _ in m.transitions))
    track = TrackAlphabet(atoms or ((VOID, VOID),))
    domain = bisimulation_reduce(union_all([top.with_tracks([track]),
                                            nodes.with_tracks([track])]))
    e_top = map_symbols(root_edges, lambda s: ((s[0], VOID), (s[0], s[1])), (track, track))
    chain = trim(conjoin(3, [(forest.relation("E"), (1, 2)), (deep, (0, 1))], budget=budget))
    e_deep = map_symbols(chain, lambda s: ((s[0], s[1]), (s[0], s[2])), (track, track))
    e = bisimulation_reduce(union_all([e_top, e_deep]))
    return Presentation(track, domain, None, {"E": (2, e)}, True)


def root_slice(p: Presentation, root: LassoWord, root_of, budget=None) -> Presentation:
    """Subtree of a forest whose node atoms determine their root letterwise."""
    keep = preimage(lasso_automaton(root), 0, root_of, p.domain.tracks[0].symbols)
    domain = bisimulation_reduce(conjoin(1, [(p.domain, (0,)), (keep, (0,))], budget=budget))
    e = bisimulation_reduce(conjoin(2, [(p.relation("E"), (0, 1)), (domain, (0,))],
                                    budget=budget))
    return Presentation(p.alphabet, domain, None, {"E": (2, e)}, True)
