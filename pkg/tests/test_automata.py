import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import BuchiAutomaton, LassoWord, TrackAlphabet, convolve
from otl.automata import (ArityMismatch, alphabet, alphabet_expand, bisimulation_reduce,
                          disjoint_union, emptiness, empty_automaton, find_member,
                          flag_intersection, lasso_automaton, member, pack, permute_tracks,
                          project, run_language, trim, universal_automaton, unpack,
                          words_automaton)
from otl.cardinality import language_cardinality

import oracles
from strategies import automata, lassos

AB = TrackAlphabet(("a", "b"))


def loop_a(accepting=True):
    return BuchiAutomaton([AB], 1, [0], [0] if accepting else [], [(0, ("a",), 0)])


def inf_many_a():
    # state 1 is entered on a
    return BuchiAutomaton([AB], 2, [0], [1], [(q, ("a",), 1) for q in (0, 1)]
                          + [(q, ("b",), 0) for q in (0, 1)])


def test_member_examples():
    m = loop_a()
    assert member(m, LassoWord.of("", "a"))
    assert not member(m, LassoWord.of("b", "a"))
    assert member(inf_many_a(), LassoWord.of("b", "ab"))
    assert not member(inf_many_a(), LassoWord.of("a", "b"))


def test_member_arity_mismatch():
    with pytest.raises(ArityMismatch):
        member(loop_a(), convolve([LassoWord.of("", "a")] * 2))


def test_emptiness_examples():
    unreachable = BuchiAutomaton([AB], 2, [0], [1], [(0, ("a",), 0), (1, ("a",), 1)])
    assert emptiness(unreachable)
    assert not emptiness(universal_automaton([AB]))
    a_only, b_only = loop_a(), BuchiAutomaton([AB], 1, [0], [0], [(0, ("b",), 0)])
    assert emptiness(flag_intersection(a_only, b_only))


def test_constructor_rejects_bad_transitions():
    with pytest.raises(ValueError):
        BuchiAutomaton([AB], 1, [0], [0], [(0, ("a",), 3)])
    with pytest.raises(ValueError):
        BuchiAutomaton([AB], 1, [0], [0], [(0, ("c",), 0)])
    with pytest.raises(ArityMismatch):
        BuchiAutomaton([AB], 1, [0], [0], [(0, ("a", "a"), 0)])


def test_immutable():
    m = loop_a()
    with pytest.raises(AttributeError):
        m.n_states = 3


def test_union_of_two_loops_has_two_runs():
    from otl import Finite, count_accepting_runs
    u = disjoint_union(loop_a(), loop_a())
    assert count_accepting_runs(u, LassoWord.of("", "a")) == Finite(2)


def test_union_with_empty_is_neutral():
    m = inf_many_a()
    u = disjoint_union(empty_automaton([AB]), m)
    for pre, per in oracles.all_words("ab", 2, 2):
        w = LassoWord.of(pre, per)
        assert member(u, w) == member(m, w)


def test_flag_state_space():
    m = flag_intersection(inf_many_a(), loop_a())
    assert m.n_states == 2 * 1 * 2


def test_alphabet_expand():
    bits = alphabet("0", "1")
    m = alphabet_expand(bits, lasso_automaton(LassoWord.of("", "a")))
    assert member(m, convolve([LassoWord.of("", "0"), LassoWord.of("", "a")]))
    assert member(m, convolve([LassoWord.of("1", "01"), LassoWord.of("", "a")]))
    assert not member(m, convolve([LassoWord.of("", "0"), LassoWord.of("b", "a")]))
    from otl import CONTINUUM
    assert language_cardinality(m) == CONTINUUM


def test_project_examples():
    pair = lasso_automaton(convolve([LassoWord.of("", "a"), LassoWord.of("", "b")]))
    p = project(pair, 1)
    assert member(p, LassoWord.of("", "a")) and not member(p, LassoWord.of("", "b"))
    expanded = alphabet_expand(alphabet("0", "1"), inf_many_a())
    back = project(expanded, 0)
    for pre, per in oracles.all_words("ab", 2, 2):
        w = LassoWord.of(pre, per)
        assert member(back, w) == member(inf_many_a(), w)
    with pytest.raises(IndexError):
        project(pair, 2)


def test_project_equality_is_full():
    eq = BuchiAutomaton([AB, AB], 1, [0], [0], [(0, ("a", "a"), 0), (0, ("b", "b"), 0)])
    full = project(eq, 0)
    for pre, per in oracles.all_words("ab", 2, 2):
        assert member(full, LassoWord.of(pre, per))


def test_words_automaton_accepts_exactly_its_words():
    words = [LassoWord.of("", "a"), LassoWord.of("b", "a"), LassoWord.of("", "ab")]
    m = words_automaton(words)
    for pre, per in oracles.all_words("ab", 3, 2):
        w = LassoWord.of(pre, per)
        assert member(m, w) == (w in words)


def test_run_language_examples():
    from otl import Finite
    m = inf_many_a()
    assert language_cardinality(run_language(m, LassoWord.of("", "ab"))) == Finite(1)
    assert emptiness(run_language(m, LassoWord.of("", "b")))
    two = disjoint_union(loop_a(), loop_a())
    assert language_cardinality(run_language(two, LassoWord.of("", "a"))) == Finite(2)


def test_pack_unpack_and_permute():
    pair = lasso_automaton(convolve([LassoWord.of("", "a"), LassoWord.of("b", "a")]))
    assert member(unpack(pack(pair), 2), convolve([LassoWord.of("", "a"), LassoWord.of("b", "a")]))
    swapped = permute_tracks(pair, [1, 0])
    assert member(swapped, convolve([LassoWord.of("b", "a"), LassoWord.of("", "a")]))


@given(automata(), lassos())
def test_member_matches_oracle(m, w):
    assert member(m, w) == oracles.member(m, w)


@given(automata(), automata(), lassos())
def test_union_and_flag_languages(m0, m1, w):
    a, b = oracles.member(m0, w), oracles.member(m1, w)
    assert member(disjoint_union(m0, m1), w) == (a or b)
    assert member(flag_intersection(m0, m1), w) == (a and b)


@given(automata(max_states=5))
def test_reductions_preserve_language(m):
    small = bisimulation_reduce(m)
    trimmed = trim(m)
    assert small.n_states <= max(m.n_states, 1)
    for pre, per in oracles.all_words("ab", 2, 2):
        w = LassoWord.of(pre, per)
        want = oracles.member(m, w)
        assert member(small, w) == want
        assert member(trimmed, w) == want


@given(automata())
def test_emptiness_and_find_member_agree(m):
    w = find_member(m)
    assert emptiness(m) == (w is None)
    if w is not None:
        assert oracles.member(m, w)


@given(automata(), lassos())
def test_run_language_counts_runs(m, w):
    got = language_cardinality(run_language(m, w))
    assert got == oracles.as_cardinality(oracles.run_count(m, w))


@given(st.lists(lassos(), min_size=1, max_size=4))
def test_lasso_automaton_singletons(words):
    for w in words:
        m = lasso_automaton(w)
        assert member(m, w)
        assert m.is_deterministic()
