import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import PAD, LassoWord, convolve, parse_lasso
from otl.lasso import all_lassos, format_lasso

from strategies import lassos


def test_convolve_pads_finite_word():
    w = convolve([LassoWord.finite("aaa"), LassoWord.of([], ["a"])])
    assert w.prefix == (("a", "a"),) * 3
    assert w.period == ((PAD, "a"),)


def test_convolve_single_track_is_identity():
    w = LassoWord.of([], ["a"])
    assert convolve([w]) == w


def test_convolve_period_lcm():
    w = convolve([LassoWord.of([], "ab"), LassoWord.of([], "abc")])
    assert w.prefix == ()
    assert len(w.period) == 6
    assert w.period[1] == ("b", "b") and w.period[3] == ("b", "a")


def test_convolve_needs_words():
    with pytest.raises(ValueError):
        convolve([])


def test_empty_period_rejected():
    with pytest.raises(ValueError):
        LassoWord([("a",)], [])


def test_mixed_arity_rejected():
    with pytest.raises(ValueError):
        LassoWord([("a",)], [("a", "b")])


def test_canonical_examples():
    assert LassoWord.of("ab", "ab") == LassoWord.of("", "ab")
    assert LassoWord.of("b", "ab") == LassoWord.of("", "ba")
    assert LassoWord.of("", "aaaa").period == (("a",),)
    assert LassoWord.of("a", "b") != LassoWord.of("", "b")


@given(lassos(), st.integers(0, 3), st.integers(1, 3))
def test_unrolled_forms_are_equal(w, extra, times):
    pre = list(w.prefix) + [w.period[i % len(w.period)] for i in range(extra)]
    k = extra % len(w.period)
    rotated = w.period[k:] + w.period[:k]
    assert LassoWord(pre, rotated * times) == w


@given(lassos(), lassos())
def test_equality_is_pointwise(u, v):
    n = max(len(u), len(v)) + 3 * max(len(u.period), len(v.period))
    same = all(u[i] == v[i] for i in range(n))
    assert (u == v) == same


@given(lassos())
def test_canonical_form_is_minimal(w):
    if w.prefix:
        assert w.prefix[-1] != w.period[-1]
    p = len(w.period)
    assert all(w.period[:d] * (p // d) != w.period for d in range(1, p) if p % d == 0)


@given(lassos(), lassos())
def test_convolve_tracks_roundtrip(u, v):
    w = convolve([u, v])
    assert w.track(0) == u and w.track(1) == v
    assert w.pack().unpack() == w


@given(lassos())
def test_literal_roundtrip(w):
    assert parse_lasso(format_lasso(w)) == w


def test_parse_literal_with_tuples():
    w = parse_lasso("a,a|⋄,a")
    assert w.prefix == (("a", "a"),) and w.period == ((PAD, "a"),)
    with pytest.raises(ValueError):
        parse_lasso("a a")


def test_all_lassos_are_distinct_and_canonical():
    words = list(all_lassos([("a",), ("b",)], 2, 2))
    assert len(words) == len(set(words))
    assert LassoWord.of("", "a") in words and LassoWord.of("ba", "ab") in words
