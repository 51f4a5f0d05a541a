from collections import Counter

import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import ALEPH0, CONTINUUM, Finite, LassoWord, Presentation, language_cardinality
from otl.automata import BuchiAutomaton, TrackAlphabet, lasso_automaton, trim, union_all
from otl.constructions import PAD, finite_structure, power_aleph0, roots_automaton
from otl.corpus import diamond, height1_corpus, infinite_star, star
from otl.product import conjoin
from otl.trees import (HeightViolation, Verdict, TreeSignature, check_forest_height,
                       compare_signatures, has_shared_children, height2_signature, iso_height1,
                       iso_height2, leaf_cardinality, leaves, tree_root)


@pytest.mark.parametrize("name,p1,p2,truth", height1_corpus(), ids=[c[0] for c in height1_corpus()])
def test_height1_corpus(name, p1, p2, truth):
    assert iso_height1(p1, p2) == truth
    assert iso_height1(p2, p1) == truth


def test_height1_rejects_deep_input():
    chain = finite_structure(["r", "a", "b"], {"E": (2, [("r", "a"), ("a", "b")])})
    with pytest.raises(HeightViolation):
        iso_height1(chain, star(1))


def test_leaf_cardinalities():
    assert leaf_cardinality(star(4), LassoWord.finite("r")) == Finite(4)
    assert leaf_cardinality(infinite_star(False), LassoWord.finite("r")) == ALEPH0
    assert leaf_cardinality(infinite_star(True), LassoWord.finite("r")) == CONTINUUM
    assert language_cardinality(leaves(star(4))) == Finite(4)


def test_forest_height_examples():
    chain = finite_structure(["r", "a", "b"], {"E": (2, [("r", "a"), ("a", "b")])})
    assert not check_forest_height(chain, 1)
    assert check_forest_height(chain, 2)
    assert has_shared_children(diamond())
    assert not check_forest_height(diamond(), 5)
    loop = finite_structure(["a"], {"E": (2, [("a", "a")])})
    assert not check_forest_height(loop, 3)
    assert check_forest_height(star(0), 0)
    assert check_forest_height(power_aleph0(star(3)), 1)
    with pytest.raises(KeyError):
        check_forest_height(star(1), 1, edge="F")


def test_tree_root_requires_one_root():
    two = finite_structure(["r", "s"], {"E": (2, [])})
    with pytest.raises(HeightViolation):
        tree_root(two)
    assert tree_root(star(2)) == LassoWord.finite("r")


# ------------------------------------------------------------ height 2

def height2(counts):
    """Root ``r`` with children ``c a^i``, child i having ``counts[i]`` leaves."""
    elems, edges = ["r"], []
    for i, n in enumerate(counts):
        child = "c" + "a" * i
        elems.append(child)
        edges.append(("r", child))
        for j in range(n):
            leaf = "l" + "a" * i + "b" * j
            elems.append(leaf)
            edges.append((child, leaf))
    return finite_structure(elems, {"E": (2, edges)})


@given(st.lists(st.integers(0, 3), max_size=3))
def test_signature_matches_counting(counts):
    sig = height2_signature(height2(counts), LassoWord.finite("r"), 3)
    want = {Finite(n): Finite(k) for n, k in Counter(counts).items()}
    assert sig.entries == want
    assert not sig.truncated


@given(st.lists(st.integers(0, 3), max_size=3), st.lists(st.integers(0, 3), max_size=3))
def test_iso_height2_matches_multisets(c1, c2):
    v = iso_height2(height2(c1), height2(c2), 3)
    assert (v.kind == "Isomorphic") == (Counter(c1) == Counter(c2))
    if v.kind == "NonIsomorphic":
        lam = v.witness
        assert Counter(c1)[lam.n] != Counter(c2)[lam.n]
        assert v.kappa1 == Finite(Counter(c1)[lam.n])


def test_truncated_signature_is_only_consistent():
    v = iso_height2(height2([5]), height2([6]), 3)
    assert v.kind == "ConsistentUpTo" and v.bound == 3
    assert iso_height2(height2([5]), height2([6]), 6).kind == "NonIsomorphic"


def test_compare_signatures_directly():
    s1 = TreeSignature({Finite(1): ALEPH0}, 4, False)
    s2 = TreeSignature({Finite(1): ALEPH0, CONTINUUM: Finite(1)}, 4, False)
    v = compare_signatures(s1, s2)
    assert v == Verdict("NonIsomorphic", CONTINUUM, Finite(0), Finite(1), 4)
    assert compare_signatures(s1, s1).kind == "Isomorphic"
    sampled = TreeSignature({Finite(1): Finite(2)}, 4, True, "sampled")
    v = compare_signatures(sampled, sampled)
    assert v.kind == "ConsistentUpTo" and v.bounded
    assert "bounded" in str(v)


def test_infinite_height2_signature():
    # countably many copies of a 2-leaf star under one new root
    copies = power_aleph0(star(2))
    top = LassoWord([(("T", "T"),)], [((PAD, PAD),)])
    atoms = copies.alphabet.union(TrackAlphabet((("T", "T"),)))

    def widen(m):
        return BuchiAutomaton([atoms] * m.arity, m.n_states, m.initial, m.accepting,
                              m.transitions)

    root = lasso_automaton(top, [atoms])
    up = trim(conjoin(2, [(root, (0,)), (widen(roots_automaton(copies)), (1,))]))
    p = Presentation(atoms, union_all([root, widen(copies.domain)]), None,
                     {"E": (2, union_all([up, widen(copies.relation("E"))]))}, True)
    assert check_forest_height(p, 2)
    assert height2_signature(p, top, 3).entries == {Finite(2): ALEPH0}
    assert iso_height2(p, p, 3).kind == "Isomorphic"
