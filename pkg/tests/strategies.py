"""Hypothesis strategies for small automata and lasso words."""

from hypothesis import strategies as st

from otl import BuchiAutomaton, LassoWord, TrackAlphabet

SYMBOLS = ("a", "b")


@st.composite
def automata(draw, max_states=4, symbols=SYMBOLS, deterministic=False):
    n = draw(st.integers(1, max_states))
    trans = set()
    for p in range(n):
        for a in symbols:
            if deterministic:
                q = draw(st.one_of(st.none(), st.integers(0, n - 1)))
                if q is not None:
                    trans.add((p, (a,), q))
            else:
                for q in draw(st.sets(st.integers(0, n - 1), max_size=2)):
                    trans.add((p, (a,), q))
    if deterministic:
        init = [0]
    else:
        init = sorted(draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=2)))
    acc = sorted(draw(st.sets(st.integers(0, n - 1), max_size=n)))
    return BuchiAutomaton([TrackAlphabet(tuple(symbols))], n, init, acc, sorted(trans))


@st.composite
def lassos(draw, max_prefix=3, max_period=3, symbols=SYMBOLS):
    pre = draw(st.lists(st.sampled_from(symbols), max_size=max_prefix))
    per = draw(st.lists(st.sampled_from(symbols), min_size=1, max_size=max_period))
    return LassoWord.of(pre, per)
