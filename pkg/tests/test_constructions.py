import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import (ALEPH0, CONTINUUM, Finite, LassoWord, eval_sentence, language_cardinality,
                 validate_presentation)
from otl.automata import member
from otl.cardinality import enumerate_members
from otl.constructions import (DOLLAR, PAD, ConstructionError, copy_slice, descendants,
                               disjoint_union_presentation, finite_structure, power_aleph0,
                               power_continuum, root_path, roots_automaton, strip_copy, subtree,
                               unfold_dag)
from otl.corpus import diamond, infinite_star, star
from otl.trees import check_forest_height, iso_height1, leaf_cardinality

NAMES = ["a", "b", "ab", "ba", "bb"]


def size(p):
    return language_cardinality(p.domain)


def edges_of(p, universe):
    e = p.relation("E")
    from otl import convolve
    return {(u, v) for u in universe for v in universe
            if member(e, convolve([LassoWord.finite(u), LassoWord.finite(v)]))}


@st.composite
def graphs(draw):
    universe = draw(st.lists(st.sampled_from(NAMES), min_size=1, max_size=4, unique=True))
    edges = draw(st.sets(st.tuples(st.sampled_from(universe), st.sampled_from(universe)),
                         max_size=5))
    return universe, edges


def make(graph):
    universe, edges = graph
    return finite_structure(universe, {"E": (2, sorted(edges))})


@given(graphs())
def test_finite_structure_is_exact(graph):
    universe, edges = graph
    p = make(graph)
    assert size(p) == Finite(len(universe))
    assert edges_of(p, NAMES) == edges
    assert validate_presentation(p).ok


@given(graphs(), graphs())
def test_disjoint_union_counts(g1, g2):
    u = disjoint_union_presentation(make(g1), make(g2))
    assert size(u) == Finite(len(g1[0]) + len(g2[0]))
    n_edges = len(g1[1]) + len(g2[1])
    assert language_cardinality(u.relation("E")) == Finite(n_edges)
    assert validate_presentation(u).ok


def test_finite_structure_rejects_foreign_tuples():
    with pytest.raises(ConstructionError):
        finite_structure(["a"], {"E": (2, [("a", "b")])})
    with pytest.raises(ConstructionError):
        finite_structure(["a"], {"E": (2, [("a",)])})


def test_powers():
    p = power_aleph0(star(2))
    assert size(p) == ALEPH0
    assert eval_sentence(p, "(exists^aleph0 r (exists^=2 x (E r x)))")
    assert eval_sentence(p, "(forall r (or (exists^=0 x (E r x)) (exists^=2 x (E r x))))")
    q = power_continuum(star(2))
    assert size(q) == CONTINUUM
    assert eval_sentence(q, "(exists^continuum r (exists^=2 x (E r x)))")
    assert not eval_sentence(q, "(exists r (exists^=3 x (E r x)))")


def test_power_needs_injective():
    from otl import Presentation
    p = star(1)
    loose = Presentation(p.alphabet, p.domain, None, p.relations, False)
    with pytest.raises(ConstructionError):
        power_aleph0(loose)


@pytest.mark.parametrize("i", [0, 1, 3])
def test_copy_slice_recovers_the_factor(i):
    base = star(3)
    sliced = copy_slice(power_aleph0(base), LassoWord([(DOLLAR,)] * i, [(PAD,)]))
    assert size(sliced) == Finite(4)
    back = strip_copy(sliced)
    assert enumerate_members(back.domain, 8) == enumerate_members(base.domain, 8)
    assert iso_height1(back, base)


def test_unfold_diamond():
    p = diamond()
    forest = unfold_dag(p, 2)
    # r, ru, rv, ruw, rvw
    assert size(forest) == Finite(5)
    assert check_forest_height(forest, 2)
    root = root_path(LassoWord.finite("r"), 2)
    assert member(forest.domain, root)
    assert eval_sentence(forest, "(exists^=2 x (exists^=0 y (E x y)))")
    assert eval_sentence(forest, "(not (exists x (exists^>=2 y (E y x))))")


def test_unfold_two_nodes():
    p = finite_structure(["r", "c"], {"E": (2, [("r", "c")])})
    forest = unfold_dag(p, 1)
    assert size(forest) == Finite(2)
    assert leaf_cardinality(forest, root_path(LassoWord.finite("r"), 1)) == Finite(1)


@pytest.mark.parametrize("n", [0, 2, 5])
def test_unfolding_a_tree_changes_nothing(n):
    tree = star(n)
    forest = unfold_dag(tree, 1)
    assert size(forest) == size(tree)
    assert iso_height1(forest, tree)


def test_unfold_infinite_star():
    forest = unfold_dag(infinite_star(True), 1)
    assert size(forest) == CONTINUUM
    assert leaf_cardinality(forest, root_path(LassoWord.finite("r"), 1)) == CONTINUUM


def test_roots_descendants_subtree():
    p = finite_structure(["r", "s", "a", "b", "ab"],
                         {"E": (2, [("r", "a"), ("a", "ab"), ("s", "b")])})
    roots = roots_automaton(p)
    assert enumerate_members(roots, 4) == {LassoWord.finite("r"), LassoWord.finite("s")}
    below = descendants(p, LassoWord.finite("r"), 2)
    assert language_cardinality(below) == Finite(3)
    assert language_cardinality(descendants(p, LassoWord.finite("r"), 1)) == Finite(2)
    t = subtree(p, LassoWord.finite("r"), 2)
    assert size(t) == Finite(3)
    assert language_cardinality(t.relation("E")) == Finite(2)
