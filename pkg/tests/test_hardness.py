import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import Finite, LassoWord, convolve, count_accepting_runs
from otl.automata import member
from otl.corpus import FIXED_SETS, TAUTOLOGY, tautology_instance, two_clause_instance
from otl.hardness import (B, InstanceError, Literal, NormalFormInstance, build_base_forest,
                          build_height3_trees, build_level_chain, build_pair_forest, cantor,
                          cantor_value, clause_automaton, clause_root, copy_word, dollar_index,
                          emit_instance_trees, in_set, marker_root, node, pair_root,
                          parse_polynomial, poly_automaton, psi_automaton, set_word, tagged,
                          unary_word, var)
from otl.trees import check_forest_height, leaf_cardinality


def _pad(e, symbol="a"):
    return unary_word(e, symbol)


# ------------------------------------------------------------ polynomials

terms = st.recursive(
    st.sampled_from(["x", "y", "1", "2"]),
    lambda inner: st.one_of(st.builds(lambda a, b: f"({a}+{b})", inner, inner),
                            st.builds(lambda a, b: f"({a}*{b})", inner, inner),
                            st.builds(lambda a: f"({a})^2", inner)),
    max_leaves=4)


@given(terms, st.integers(1, 4), st.integers(1, 4))
def test_parse_matches_arithmetic(text, x, y):
    p = parse_polynomial(text, ["x", "y"])
    assert p.evaluate([x, y]) == eval(text.replace("^", "**"), {}, {"x": x, "y": y})


@given(terms)
def test_run_counts_are_polynomial_values(text):
    p = parse_polynomial(text, ["x", "y"])
    m = poly_automaton(p, 2)
    for x, y in [(1, 1), (1, 2), (3, 1)]:
        got = count_accepting_runs(m, convolve([_pad(x), _pad(y)]))
        assert got == Finite(p.evaluate([x, y]))


def test_pairing_values():
    m = poly_automaton(cantor(var(0), var(1)), 2, B)
    seen = set()
    for e1, e2 in itertools.product(range(1, 5), repeat=2):
        want = cantor_value(e1, e2)
        assert count_accepting_runs(m, convolve([_pad(e1, B), _pad(e2, B)])) == Finite(want)
        assert want % 2 == 0 and want not in seen
        seen.add(want)
    assert cantor_value(1, 2) == 14


def test_words_outside_the_shape_have_no_runs():
    m = poly_automaton(var(0), 1)
    assert count_accepting_runs(m, LassoWord.finite([])) == Finite(0)
    assert count_accepting_runs(m, LassoWord.of("", "a")) == Finite(0)


@pytest.mark.parametrize("text", ["x-y", "x/2", "x^y", "w", "(", "True"])
def test_bad_polynomials(text):
    with pytest.raises(InstanceError):
        parse_polynomial(text, ["x", "y"])


def test_zero_polynomial_has_no_automaton():
    with pytest.raises(InstanceError):
        poly_automaton(parse_polynomial("0", ["x"]), 1)


# ------------------------------------------------------------ set constraints

LITERALS = [[Literal("x", True, 1)], [Literal("x", False, 1), Literal("y", True, 1)],
            [Literal("x", True, 1), Literal("x", False, 2)]]


@pytest.mark.parametrize("lits", LITERALS, ids=["x in X1", "x notin X1 or y in X1",
                                                "x in X1 or x notin X2"])
def test_psi_truth_table(lits):
    n = max(l.set_index for l in lits)
    yes = psi_automaton(lits, n, ["x", "y"])
    no = psi_automaton(lits, n, ["x", "y"], negate=True)
    assert yes.is_deterministic()
    for sets in itertools.product(FIXED_SETS, repeat=n):
        words = [set_word(s) for s in sets]
        for x, y in itertools.product(range(1, 5), repeat=2):
            want = any(in_set(words[l.set_index - 1], {"x": x, "y": y}[l.var]) == l.positive
                       for l in lits)
            w = convolve(words + [_pad(x), _pad(y)])
            assert member(yes, w) == want
            assert member(no, w) == (not want)


def test_psi_rejects_malformed_individuals():
    m = psi_automaton([Literal("x", True, 1)], 1, ["x"])
    assert not member(m, convolve([set_word(("", "1")), LassoWord.finite([])]))
    assert not member(m, convolve([set_word(("", "1")), LassoWord.of("", "a")]))


def test_psi_argument_errors():
    with pytest.raises(InstanceError):
        psi_automaton([], 1, ["x"])
    with pytest.raises(InstanceError):
        psi_automaton([Literal("q", True, 1)], 1, ["x"])
    with pytest.raises(InstanceError):
        psi_automaton([Literal("x", True, 2)], 1, ["x"])


# ------------------------------------------------------------ clause automata

def test_tautology_clause_always_gives_14():
    inst = tautology_instance()
    m = clause_automaton(inst, 1)
    for pre, per in FIXED_SETS[:2]:
        for x, y, zp in itertools.product(range(1, 3), repeat=3):
            w = convolve([set_word((pre, per)), _pad(x), _pad(y), _pad(zp)])
            assert count_accepting_runs(m, w) == Finite(14)


def test_two_clause_counts():
    inst = two_clause_instance()
    for i in (1, 2):
        m = clause_automaton(inst, i)
        for pre, per in FIXED_SETS:
            for x, y, z, zp in itertools.product(range(1, 3), repeat=4):
                vals = {"x": x, "y": y, "z1": z}
                w = convolve([set_word((pre, per)), _pad(x), _pad(y), _pad(z), _pad(zp)])
                want = inst.expected_leaves(i, [set_word((pre, per))], vals, zp)
                assert count_accepting_runs(m, w) == Finite(want)
    with pytest.raises(IndexError):
        clause_automaton(inst, 3)


def test_expected_leaves_formula():
    inst = two_clause_instance()
    # clause 2: p = x+z1, q = y, psi = y notin X1 or z1 in X1; X1 = {} makes psi true
    assert inst.expected_leaves(2, [("", "0")], {"x": 1, "y": 1, "z1": 1}, 1) == 14
    # X1 = {1}, y = 1, z1 = 2: psi false, C(1+2+1, 1+1) = 36 + 12 + 2
    assert inst.expected_leaves(2, [("1", "0")], {"x": 1, "y": 1, "z1": 2}, 1) == 50


# ------------------------------------------------------------ forests

def test_base_forest_leaf_counts():
    inst = tautology_instance()
    forest = build_base_forest(inst, markers=True)
    assert check_forest_height(forest, 1)
    assert leaf_cardinality(forest, pair_root(1, 2)) == Finite(14)
    assert leaf_cardinality(forest, pair_root(2, 2)) == Finite(cantor_value(2, 2))
    assert leaf_cardinality(forest, marker_root(3)) == Finite(7)
    root = clause_root(inst, 1, [set_word(("", "0"))], {"x": 2, "y": 1}, 1)
    assert leaf_cardinality(forest, root) == Finite(14)


def test_pair_forest_blocks():
    level = build_pair_forest(tautology_instance())
    assert check_forest_height(level.forest, 2)
    e = level.forest.relation("E")

    def has_block(m, e1, e2):
        parent = node([tagged("B", [unary_word(m, B)])], 2)
        child = node([tagged("B", [unary_word(m, B)]),
                      copy_word(pair_root(e1, e2), dollar_index(0))], 2)
        return member(e, convolve([parent, child]))

    # b^0 is the omega tree: diagonal blocks only below b^m with m >= 1
    for m in range(3):
        for e1, e2 in itertools.product(range(1, 4), repeat=2):
            assert has_block(m, e1, e2) == (e1 != e2 or 1 <= m <= e1), (m, e1, e2)


def test_marker_construction_needs_one_set():
    inst = NormalFormInstance.from_json({**TAUTOLOGY, "n": 2})
    with pytest.raises(InstanceError):
        build_pair_forest(inst, markers=True)
    with pytest.raises(InstanceError):
        build_height3_trees(inst, 1)


# ------------------------------------------------------------ instances

@pytest.mark.parametrize("data", [
    {"n": 0, "k": 0, "clauses": TAUTOLOGY["clauses"]},
    {"n": 1, "k": -1, "clauses": TAUTOLOGY["clauses"]},
    {"n": 1, "k": 0, "clauses": []},
    {"n": 1, "k": 0},
    {"n": 1, "k": 0, "clauses": [{"p": "x", "q": "y", "psi": [["x", "maybe", 1]]}]},
    {"n": 1, "k": 0, "clauses": [{"p": "x", "q": "y", "psi": [["z1", "in", 1]]}]},
    {"n": 1, "k": 0, "clauses": [{"p": "x", "q": "y", "psi": [["x", "in", 2]]}]},
    {"n": 1, "k": 0, "clauses": [{"p": "x-y", "q": "y", "psi": [["x", "in", 1]]}]},
    {"n": "one", "k": 0, "clauses": TAUTOLOGY["clauses"]},
])
def test_instance_errors(data):
    with pytest.raises(InstanceError):
        NormalFormInstance.from_json(data)


def test_instance_roundtrip():
    inst = two_clause_instance()
    again = NormalFormInstance.from_json(inst.to_json())
    assert again.to_json() == inst.to_json()
    assert again.tracks == ["x", "y", "z1", "z+"]


def test_size_and_argument_limits():
    big = NormalFormInstance.from_json({**TAUTOLOGY, "n": 3})
    with pytest.raises(InstanceError):
        build_level_chain(big)
    with pytest.raises(InstanceError):
        emit_instance_trees(tautology_instance(), 0)
    with pytest.raises(InstanceError):
        build_height3_trees(tautology_instance(), 0)
