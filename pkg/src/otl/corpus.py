"""Small named inputs with known answers: languages, height-1 trees, dags, instances.

Used by the acceptance suite, the demos and ``otl selftest``.
"""

from __future__ import annotations

from .automata import BuchiAutomaton, TrackAlphabet, lasso_automaton, map_symbols, trim, union_all
from .cardinality import ALEPH0, CONTINUUM, Cardinality, Finite
from .constructions import finite_structure
from .hardness import (B, NormalFormInstance, cantor, cantor_value, pair_root, poly_automaton,
                       run_forest, var)
from .lasso import PAD, LassoWord
from .presentation import Presentation
from .product import conjoin

TAUTOLOGY = {"n": 1, "k": 0,
             "clauses": [{"p": "x", "q": "y", "psi": [["x", "in", 1], ["x", "notin", 1]]}]}

TWO_CLAUSES = {"n": 1, "k": 1, "clauses": [
    {"p": "x", "q": "y", "psi": [["x", "in", 1]]},
    {"p": "x+z1", "q": "y", "psi": [["y", "notin", 1], ["z1", "in", 1]]},
]}

# characteristic words of four fixed sets: N, {}, odd numbers, {1}
FIXED_SETS = [("", "1"), ("", "0"), ("", "10"), ("1", "0")]


def tautology_instance() -> NormalFormInstance:
    return NormalFormInstance.from_json(TAUTOLOGY)


def two_clause_instance() -> NormalFormInstance:
    return NormalFormInstance.from_json(TWO_CLAUSES)


# ------------------------------------------------------------ languages

def _auto(n, init, acc, trans, symbols, pad=None) -> BuchiAutomaton:
    return BuchiAutomaton([TrackAlphabet(tuple(symbols), pad)], n, init, acc,
                          [(p, (a,), q) for p, a, q in trans])


def singleton_automaton() -> BuchiAutomaton:
    """Accepts only ``a^omega``."""
    return lasso_automaton(LassoWord.of([], ["a"]))


def finite_language(words) -> BuchiAutomaton:
    """Union of the single-word automata of the given ``"prefix|period"`` pairs."""
    autos = [lasso_automaton(LassoWord.of(list(pre), list(per))) for pre, per in words]
    alphabet = TrackAlphabet(tuple(sorted({a for m in autos for a in m.tracks[0].symbols})))
    return trim(union_all([BuchiAutomaton([alphabet], m.n_states, m.initial, m.accepting,
                                          m.transitions) for m in autos]))


def language_suite() -> list[tuple[str, BuchiAutomaton, Cardinality]]:
    """Fifteen languages over small alphabets with known cardinalities."""
    ab = ("a", "b")
    suite = [
        ("empty", _auto(1, (0,), (), [(0, "a", 0)], ab), Finite(0)),
        ("a^w", singleton_automaton(), Finite(1)),
        ("{a^w, b^w}", finite_language([("", "a"), ("", "b")]), Finite(2)),
        ("{a^w, ba^w, bba^w}", finite_language([("", "a"), ("b", "a"), ("bb", "a")]), Finite(3)),
        ("{(ab)^w, (ba)^w, a^w, b^w}",
         finite_language([("", "ab"), ("", "ba"), ("", "a"), ("", "b")]), Finite(4)),
        ("b^i a^w, i < 5", _auto(6, (0,), (5,),
                                 [(i, "b", i + 1) for i in range(4)]
                                 + [(i, "a", 5) for i in range(5)] + [(5, "a", 5)], ab), Finite(5)),
        ("six lassos", finite_language([("", "a"), ("", "b"), ("a", "b"), ("b", "a"),
                                        ("", "ab"), ("aa", "b")]), Finite(6)),
        # a word read by two different runs still counts once
        ("ambiguous a^w", _auto(3, (0,), (1, 2), [(0, "a", 1), (0, "a", 2), (1, "a", 1),
                                                  (2, "a", 2)], ab), Finite(1)),
        ("a* b^w", _auto(2, (0,), (1,), [(0, "a", 0), (0, "b", 1), (1, "b", 1)], ab), ALEPH0),
        ("finitely many b", _auto(2, (0,), (1,), [(0, "a", 0), (0, "b", 0), (1, "a", 1),
                                                  (0, "a", 1)], ab), ALEPH0),
        ("(a|b)^w", _auto(1, (0,), (0,), [(0, "a", 0), (0, "b", 0)], ab), CONTINUUM),
        ("a^i b a^w", _auto(3, (0,), (2,), [(0, "a", 0), (0, "b", 1), (1, "a", 2), (2, "a", 2)],
                            ab), ALEPH0),
        ("a^i b^j a^w, two counters",
         _auto(3, (0,), (2,), [(0, "a", 0), (0, "b", 1), (1, "b", 1), (1, "a", 2), (2, "a", 2)],
               ab), ALEPH0),
        ("infinitely many b", _auto(2, (0,), (1,), [(0, "a", 0), (0, "b", 1), (1, "a", 0),
                                                    (1, "b", 1)], ab), CONTINUUM),
        ("(ab)* a^w non-accepting loop", _auto(3, (0,), (2,),
                                               [(0, "a", 1), (1, "b", 0), (0, "a", 2),
                                                (2, "a", 2)], ab), ALEPH0),
    ]
    return suite


# ------------------------------------------------------------ height-1 trees

def star(n_leaves: int, root: str = "r", leaf: str = "l") -> Presentation:
    """Finite tree of height 1: ``root`` with leaves ``leaf a^i``."""
    leaves = [leaf + "a" * i for i in range(n_leaves)]
    return finite_structure([root] + leaves, {"E": (2, [(root, x) for x in leaves])})


def _edge_to(root: LassoWord, leaves: BuchiAutomaton) -> BuchiAutomaton:
    r = lasso_automaton(root)
    return trim(conjoin(2, [(r, (0,)), (leaves, (1,))]))


def _single_track(m: BuchiAutomaton, symbols) -> BuchiAutomaton:
    return BuchiAutomaton([TrackAlphabet(tuple(symbols), PAD)], m.n_states, m.initial,
                          m.accepting, m.transitions)


def infinite_star(continuum: bool) -> Presentation:
    """Root ``r`` with leaves ``l a^i`` (countably many) or ``l {a,b}^omega`` (continuum)."""
    syms = ("r", "l", "a", "b", PAD)
    if continuum:
        leaves = _single_track(BuchiAutomaton.build(2, (0,), (1,), [(0, ("l",), 1), (1, ("a",), 1),
                                                                    (1, ("b",), 1)], tracks=1),
                               syms)
    else:
        leaves = _single_track(BuchiAutomaton.build(3, (0,), (2,), [(0, ("l",), 1), (1, ("a",), 1),
                                                                    (1, (PAD,), 2),
                                                                    (2, (PAD,), 2)], tracks=1),
                               syms)
    root = LassoWord.finite("r")
    r = _single_track(lasso_automaton(root), syms)
    domain = trim(union_all([r, leaves]))
    return Presentation(domain.tracks[0], domain, None, {"E": (2, _edge_to(root, leaves))}, True)


def s_block_explicit(e1: int, e2: int) -> Presentation:
    """``S[e1,e2]`` listed element by element."""
    return star(cantor_value(e1, e2), "s")


def s_block_runs(e1: int, e2: int) -> Presentation:
    """``S[e1,e2]`` as the runs of the pairing-polynomial automaton on ``b^e1 (x) b^e2``."""
    poly = poly_automaton(cantor(var(0), var(1)), 2, B)
    root = pair_root(e1, e2)
    packed = trim(map_symbols(poly, lambda s: (s,), 1))
    only = trim(conjoin(1, [(packed, (0,)), (lasso_automaton(root, packed.tracks), (0,))]))
    return run_forest(only)


def height1_corpus() -> list[tuple[str, Presentation, Presentation, bool]]:
    """Ten pairs with the ground truth "same number of leaves"."""
    return [
        ("S[2,3] explicit vs runs", s_block_explicit(2, 3), s_block_runs(2, 3), True),
        ("S[1,2] runs vs S[2,1] runs", s_block_runs(1, 2), s_block_runs(2, 1), False),
        ("S[1,1] runs vs 8 leaves", s_block_runs(1, 1), star(8), True),
        ("3 vs 3 leaves, other atoms", star(3), star(3, "q", "m"), True),
        ("3 vs 4 leaves", star(3), star(4), False),
        ("no leaves vs no leaves", star(0), star(0, "q"), True),
        ("countable vs countable", infinite_star(False), infinite_star(False), True),
        ("countable vs continuum", infinite_star(False), infinite_star(True), False),
        ("continuum vs continuum", infinite_star(True), infinite_star(True), True),
        ("6 leaves vs countable", star(6), infinite_star(False), False),
    ]


def diamond() -> Presentation:
    """The dag ``r -> u, r -> v, u -> w, v -> w``."""
    return finite_structure(["r", "u", "v", "w"],
                            {"E": (2, [("r", "u"), ("r", "v"), ("u", "w"), ("v", "w")])})
