import pytest
from hypothesis import given
from hypothesis import strategies as st

from otl import (BuchiAutomaton, LassoWord, Presentation, TrackAlphabet, eval_sentence,
                 validate_presentation)
from otl.automata import emptiness, member
from otl.constructions import finite_structure
from otl.corpus import infinite_star
from otl.formula import (And, Eq, Exists, ExistsCard, Forall, FormulaError, Not, Or, Rel,
                         format_formula, free_vars, parse_formula)
from otl.parity import difference
from otl.presentation import compile_formula
from otl.sections import AtLeast, Exactly

NAMES = ["a", "b", "ab", "ba"]
def brute(structure, f, env):
    """Direct evaluation on a finite structure ``(universe, relations)``."""
    universe, rels = structure
    if isinstance(f, Rel):
        return tuple(env[a] for a in f.args) in rels[f.name]
    if isinstance(f, Eq):
        return env[f.left] == env[f.right]
    if isinstance(f, Not):
        return not brute(structure, f.body, env)
    if isinstance(f, And):
        return all(brute(structure, p, env) for p in f.parts)
    if isinstance(f, Or):
        return any(brute(structure, p, env) for p in f.parts)
    hits = sum(brute(structure, f.body, {**env, f.var: u}) for u in universe)
    if isinstance(f, Exists):
        return hits > 0
    if isinstance(f, Forall):
        return hits == len(universe)
    if isinstance(f, ExistsCard):
        t = f.target
        if t.kind == "exactly":
            return hits == t.n
        if t.kind == "atleast":
            return hits >= t.n
        return False  # finite structures have no infinite sets
    return f.value


@st.composite
def structures(draw):
    universe = draw(st.lists(st.sampled_from(NAMES), min_size=1, max_size=4, unique=True))
    edges = draw(st.sets(st.tuples(st.sampled_from(universe), st.sampled_from(universe)),
                         max_size=6))
    marked = draw(st.sets(st.sampled_from(universe)))
    return universe, {"E": edges, "P": {(u,) for u in marked}}


def formulas(variables=("x", "y")):
    atoms = st.one_of(
        st.builds(lambda a, b: Rel("E", (a, b)), st.sampled_from(variables),
                  st.sampled_from(variables)),
        st.builds(lambda a: Rel("P", (a,)), st.sampled_from(variables)),
        st.builds(Eq, st.sampled_from(variables), st.sampled_from(variables)))

    def extend(inner):
        v = st.sampled_from(variables)
        return st.one_of(
            st.builds(Not, inner),
            st.builds(lambda a, b: And((a, b)), inner, inner),
            st.builds(lambda a, b: Or((a, b)), inner, inner),
            st.builds(Exists, v, inner),
            st.builds(Forall, v, inner),
            st.builds(ExistsCard, v, st.sampled_from([Exactly(1), Exactly(2), AtLeast(2)]), inner))

    return st.recursive(atoms, extend, max_leaves=4)


def close(f):
    for v in reversed(free_vars(f)):
        f = Exists(v, f)
    return f


def present(structure):
    universe, rels = structure
    return finite_structure(universe, {"E": (2, sorted(rels["E"])), "P": (1, sorted(rels["P"]))})


@given(structures(), formulas())
def test_model_checker_matches_brute_force(structure, f):
    sentence = close(f)
    assert eval_sentence(present(structure), sentence) == brute(structure, sentence, {})


@given(structures(), formulas())
def test_compiled_formula_accepts_satisfying_tuples(structure, f):
    p = present(structure)
    free = free_vars(f)
    auto = compile_formula(p, f, free)
    universe = structure[0]
    from itertools import product
    from otl import convolve
    for values in product(universe, repeat=len(free)):
        if not free:
            break
        w = convolve([LassoWord.finite(v) for v in values])
        assert member(auto, w) == brute(structure, f, dict(zip(free, values)))


def test_sentence_examples():
    two = finite_structure(["a", "b"])
    assert eval_sentence(two, "(exists x (= x x))")
    assert not eval_sentence(two, "(forall x (forall y (= x y)))")
    edge = finite_structure(["r", "x"], {"E": (2, [("r", "x")])})
    parent = compile_formula(edge, parse_formula("(exists y (E x y))"), ["x"])
    assert member(parent, LassoWord.finite("r")) and not member(parent, LassoWord.finite("x"))


def test_identity_formula_is_domain():
    p = infinite_star(False)
    auto = compile_formula(p, parse_formula("(= x x)"), ["x"])
    assert emptiness(difference(auto, p.domain)) and emptiness(difference(p.domain, auto))


def test_diagonal_for_injective():
    p = present((NAMES, {"E": set(), "P": set()}))
    auto = compile_formula(p, parse_formula("(= x y)"), ["x", "y"])
    from otl import convolve
    for u in NAMES:
        for v in NAMES:
            w = convolve([LassoWord.finite(u), LassoWord.finite(v)])
            assert member(auto, w) == (u == v)


def test_cardinality_quantifiers_on_infinite_domains():
    assert eval_sentence(infinite_star(True), "(exists^continuum x (= x x))")
    assert not eval_sentence(infinite_star(False), "(exists^continuum x (= x x))")
    assert eval_sentence(infinite_star(False), "(exists^aleph0 x (exists r (E r x)))")
    nested = "(exists r (exists^aleph0 x (and (E r x) (exists^=0 y (E x y)))))"
    assert eval_sentence(infinite_star(False), nested)


@pytest.mark.parametrize("text", ["(exists x (E x y))", "(forall x (or (P x) (not (P x))))",
                                  "(exists^=2 x (P x))", "(exists^>=1 x (E x x))"])
def test_equivalences(text):
    universe = ["a", "b", "ab"]
    p = present((universe, {"E": {("a", "b"), ("b", "b")}, "P": {("a",), ("ab",)}}))
    f = parse_formula(text)
    free = free_vars(f)
    base = compile_formula(p, f, free)
    double = compile_formula(p, Not(Not(f)), free)
    assert emptiness(difference(base, double)) and emptiness(difference(double, base))
    if isinstance(f, Exists):
        dual = compile_formula(p, Not(Forall(f.var, Not(f.body))), free)
        assert emptiness(difference(base, dual)) and emptiness(difference(dual, base))


def test_parse_roundtrip_and_errors():
    f = parse_formula("(exists^aleph0 x (and (E r x) (exists^continuum y (E x y))))")
    assert parse_formula(format_formula(f)) == f
    assert free_vars(f) == ["r"]
    for bad in ["(exists x)", "()", "(not)", "(= x)", "(and (E x y)", "x",
                "(exists^weird x (P x))"]:
        with pytest.raises(FormulaError):
            parse_formula(bad)


def test_unknown_relation_is_an_error():
    with pytest.raises(FormulaError):
        eval_sentence(finite_structure(["a"]), "(exists x (Q x))")


# ------------------------------------------------------------ validation

def _pairs(pairs):
    return BuchiAutomaton.build(2, (0,), (1,), [(0, (u, v), 1) for u, v in pairs]
                                + [(1, ("⋄", "⋄"), 1)],
                                tracks=[TrackAlphabet(("a", "b", "c", "⋄"), "⋄")] * 2)


def _domain():
    return BuchiAutomaton.build(2, (0,), (1,), [(0, (u,), 1) for u in "abc"] + [(1, ("⋄",), 1)],
                                tracks=[TrackAlphabet(("a", "b", "c", "⋄"), "⋄")])


def test_identity_presentation_validates():
    p = finite_structure(["a", "b"])
    rep = validate_presentation(p)
    assert rep.ok and rep.checks["injective"]


def test_validation_flags_defects():
    dom = _domain()
    eq = _pairs([("a", "a"), ("b", "b"), ("c", "c"), ("a", "b")])
    rep = validate_presentation(Presentation(dom.tracks[0], dom, eq, {}, False))
    assert not rep.checks["symmetric"] and rep.checks["reflexive"]
    eq = _pairs([("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "a")])
    rel = BuchiAutomaton.build(2, (0,), (1,), [(0, ("a",), 1), (1, ("⋄",), 1)],
                               tracks=dom.tracks)
    rep = validate_presentation(Presentation(dom.tracks[0], dom, eq, {"P": (1, rel)}, False))
    assert rep.checks["symmetric"] and rep.checks["transitive"]
    assert not rep.checks["congruence P"]
    rep = validate_presentation(Presentation(dom.tracks[0], dom, eq, {}, True))
    assert not rep.checks["injective"]


def test_quotient_model_checking():
    dom = _domain()
    eq = _pairs([("a", "a"), ("b", "b"), ("c", "c"), ("a", "b"), ("b", "a")])
    p = Presentation(dom.tracks[0], dom, eq, {}, False)
    assert validate_presentation(p).ok
    assert eval_sentence(p, "(exists^=2 x (= x x))")
