"""Omega-automatic presentations and first-order model checking over them.

A presentation consists of a domain automaton, an equality automaton (or
the identity) and one automaton per relation symbol.  Formulas compile to
automata with one track per free variable; sentences compile to 0-track
automata that accept (the constant word over ``()``) iff they hold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automata import (BuchiAutomaton, TrackAlphabet, disjoint_union, emptiness, empty_automaton,
                       map_symbols, member, project, trim)
from .cardinality import language_cardinality
from .formula import (And, Const, Eq, Exists, ExistsCard, Forall, FormulaError, Not, Or, Rel,
                      free_vars, parse_formula)
from .lasso import LassoWord
from .parity import difference
from .product import ConstantTrack, Distinct, Equal, LexLess, conjoin
from .sections import section_classifier

TRUE_AUTOMATON = BuchiAutomaton((), 1, (0,), (0,), [(0, (), 0)])
FALSE_AUTOMATON = BuchiAutomaton((), 0, (), (), ())


@dataclass
class Presentation:
    alphabet: TrackAlphabet
    domain: BuchiAutomaton
    equality: BuchiAutomaton | None = None
    relations: dict = field(default_factory=dict)
    injective: bool = True

    def __post_init__(self):
        if self.domain.arity != 1:
            raise ValueError("the domain automaton must have one track")
        if self.equality is not None and self.equality.arity != 2:
            raise ValueError("the equality automaton must have two tracks")
        rels = {}
        for name, spec in self.relations.items():
            arity, auto = spec if isinstance(spec, tuple) else (spec.arity, spec)
            if auto.arity != arity:
                raise ValueError(f"relation {name}: declared arity {arity}, automaton has {auto.arity}")
            rels[name] = (arity, auto)
        self.relations = rels

    @property
    def identity(self) -> bool:
        return self.equality is None

    def relation(self, name: str) -> BuchiAutomaton:
        try:
            return self.relations[name][1]
        except KeyError:
            raise FormulaError(f"unknown relation symbol {name!r}") from None

    def arity(self, name: str) -> int:
        return self.relations[name][0]

    def equality_automaton(self) -> BuchiAutomaton:
        """Explicit equality automaton (the diagonal of the domain for identity)."""
        if self.equality is not None:
            return self.equality
        return map_symbols(self.domain, lambda a: (a[0], a[0]), self.domain.tracks * 2)

    def sizes(self) -> dict:
        out = {"domain": self.domain.n_states}
        if self.equality is not None:
            out["equality"] = self.equality.n_states
        for name, (_, auto) in sorted(self.relations.items()):
            out[name] = auto.n_states
        return out


def domain_power(p: Presentation, k: int) -> BuchiAutomaton:
    if k == 0:
        return TRUE_AUTOMATON
    return conjoin(k, [(p.domain, (i,)) for i in range(k)])


class Compiler:
    """Formula compiler for one presentation.

    ``constants`` binds variable names to concrete lasso words (elements).
    ``sampled`` becomes true if any cardinality quantifier had to fall
    back to a bounded sampling classifier.
    """

    def __init__(self, p: Presentation, constants: dict | None = None, budget=None):
        self.p = p
        self.budget = budget
        self.constants = dict(constants or {})
        self.sampled = False
        for name, w in self.constants.items():
            if not member(p.domain, w):
                raise FormulaError(f"constant {name} = {w} is not in the domain")
        self._reps = None

    # -- helpers
    def _atom(self, auto: BuchiAutomaton, args: tuple):
        vars_ = [a for a in dict.fromkeys(args) if a not in self.constants]
        consts = [a for a in dict.fromkeys(args) if a in self.constants]
        pos = {v: i for i, v in enumerate(vars_ + consts)}
        explicit = [(auto, [pos[a] for a in args])]
        explicit += [(self.p.domain, (pos[v],)) for v in vars_]
        lazy = [ConstantTrack(pos[c], self.constants[c]) for c in consts]
        prod = conjoin(len(pos), explicit, lazy, budget=self.budget)
        if consts:
            k = len(vars_)
            prod = map_symbols(prod, lambda a: a[:k], prod.tracks[:k])
        return trim(prod), tuple(vars_)

    def _cyl(self, comp, target_vars):
        auto, vars_ = comp
        if tuple(vars_) == tuple(target_vars):
            return auto
        explicit = [(auto, [target_vars.index(v) for v in vars_])]
        explicit += [(self.p.domain, (i,)) for i, v in enumerate(target_vars) if v not in vars_]
        return trim(conjoin(len(target_vars), explicit, budget=self.budget))

    def representatives(self) -> BuchiAutomaton:
        """Lexicographically least element of each equality class."""
        if self.p.identity:
            return self.p.domain
        if self._reps is None:
            eq = self.p.equality
            smaller = conjoin(2, [(eq, (0, 1)), (self.p.domain, (1,))], [LexLess(1, 0)],
                              budget=self.budget)
            reps = difference(self.p.domain, project(smaller, 1), budget=self.budget)
            covered = project(conjoin(2, [(eq, (0, 1)), (reps, (1,))], budget=self.budget), 1)
            if not emptiness(difference(self.p.domain, covered, budget=self.budget)):
                raise FormulaError("some equality class has no lexicographically least element; "
                                   "counting quantifiers are unsupported on this presentation")
            self._reps = reps
        return self._reps

    # -- compilation
    def compile(self, f):
        if isinstance(f, Const):
            return (TRUE_AUTOMATON if f.value else FALSE_AUTOMATON), ()
        if isinstance(f, Rel):
            arity = self.p.arity(f.name) if f.name in self.p.relations else None
            if arity is None:
                raise FormulaError(f"unknown relation symbol {f.name!r}")
            if arity != len(f.args):
                raise FormulaError(f"{f.name} has arity {arity}, used with {len(f.args)} arguments")
            return self._atom(self.p.relation(f.name), f.args)
        if isinstance(f, Eq):
            if f.left == f.right:
                return self._atom(self.p.domain, (f.left,))
            return self._atom(self.p.equality_automaton(), (f.left, f.right))
        if isinstance(f, Not):
            auto, vars_ = self.compile(f.body)
            if not vars_:
                return (TRUE_AUTOMATON if emptiness(auto) else FALSE_AUTOMATON), ()
            return trim(difference(domain_power(self.p, len(vars_)), auto, budget=self.budget)), vars_
        if isinstance(f, And):
            comps = [self.compile(g) for g in f.parts]
            vars_ = tuple(dict.fromkeys(v for _, vs in comps for v in vs))
            explicit = [(a, [vars_.index(v) for v in vs]) for a, vs in comps]
            return trim(conjoin(len(vars_), explicit, budget=self.budget)), vars_
        if isinstance(f, Or):
            comps = [self.compile(g) for g in f.parts]
            vars_ = tuple(dict.fromkeys(v for _, vs in comps for v in vs))
            autos = [self._cyl(c, vars_) for c in comps]
            result = autos[0]
            for a in autos[1:]:
                result = disjoint_union(result, a)
            return trim(result), vars_
        if isinstance(f, Exists):
            auto, vars_ = self.compile(f.body)
            if f.var not in vars_:
                return (auto if not emptiness(self.p.domain) else empty_automaton(auto.tracks)), vars_
            i = vars_.index(f.var)
            return trim(project(auto, i)), vars_[:i] + vars_[i + 1:]
        if isinstance(f, Forall):
            return self.compile(Not(Exists(f.var, Not(f.body))))
        if isinstance(f, ExistsCard):
            return self._counting(f)
        raise FormulaError(f"not a formula node: {f!r}")

    def _counting(self, f: ExistsCard):
        auto, vars_ = self.compile(f.body)
        reps = self.representatives()
        if f.var not in vars_:
            holds = f.target.matches(language_cardinality(reps, self.budget))
            return (auto if holds else empty_automaton(auto.tracks)), vars_
        i = vars_.index(f.var)
        params = vars_[:i] + vars_[i + 1:]
        if not self.p.identity:
            auto = trim(conjoin(len(vars_), [(auto, range(len(vars_))), (reps, (i,))],
                                budget=self.budget))
        if not params:
            holds = f.target.matches(language_cardinality(auto, self.budget))
            return (TRUE_AUTOMATON if holds else FALSE_AUTOMATON), ()
        idx = [vars_.index(v) for v in params]
        rel = map_symbols(auto, lambda a: (tuple(a[j] for j in idx), a[i]), 2)
        universe = map_symbols(domain_power(self.p, len(params)), lambda a: (a,), 1)
        cls = section_classifier(rel, f.target, universe=universe, budget=self.budget)
        if not cls.exact:
            self.sampled = True
        k = len(params)
        out = map_symbols(cls.automaton, lambda a: tuple(a[0]), k)
        return trim(out), params


def compile_formula(p: Presentation, formula, free: list | None = None,
                    constants: dict | None = None, budget=None) -> BuchiAutomaton:
    """Automaton with one track per free variable (in the order ``free``)."""
    if isinstance(formula, str):
        formula = parse_formula(formula)
    comp = Compiler(p, constants, budget)
    auto, vars_ = comp.compile(formula)
    if free is None:
        free = [v for v in free_vars(formula) if v not in comp.constants]
    if set(free) != set(vars_):
        missing = set(vars_) - set(free)
        if missing:
            raise FormulaError(f"free variables {sorted(missing)} not listed")
    return comp._cyl((auto, vars_), tuple(free)) if free else auto


def eval_sentence(p: Presentation, formula, constants: dict | None = None, budget=None) -> bool:
    if isinstance(formula, str):
        formula = parse_formula(formula)
    comp = Compiler(p, constants, budget)
    auto, vars_ = comp.compile(formula)
    if vars_:
        raise FormulaError(f"not a sentence: free variables {list(vars_)}")
    return not emptiness(auto)


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def __str__(self):
        lines = [f"{name}: {'ok' if good else 'FAILED'}" for name, good in self.checks.items()]
        return "\n".join(lines + self.notes)


def validate_presentation(p: Presentation, budget=None) -> ValidationReport:
    """Check the equality congruence axioms and the injectivity claim.

    Every check looks for a counterexample automaton and tests it for
    emptiness.  With identity equality the congruence axioms hold by
    construction and only the track structure is checked.
    """
    rep = ValidationReport()
    for name, (arity, auto) in p.relations.items():
        rep.checks[f"arity {name}"] = auto.arity == arity
    rep.checks["domain nonempty"] = not emptiness(p.domain)
    if p.identity:
        rep.checks["reflexive"] = rep.checks["symmetric"] = rep.checks["transitive"] = True
        for name in p.relations:
            rep.checks[f"congruence {name}"] = True
        rep.checks["injective"] = True
        rep.notes.append("equality is the identity; congruence holds by construction")
        return rep
    dom, eq = p.domain, p.equality
    refl = project(conjoin(2, [(eq, (0, 1)), (dom, (0,))], budget=budget,
                           lazy=[Equal(0, 1)]), 1)
    rep.checks["reflexive"] = emptiness(difference(dom, refl, budget=budget))
    eq_dom = trim(conjoin(2, [(eq, (0, 1)), (dom, (0,)), (dom, (1,))], budget=budget))
    swapped = map_symbols(eq, lambda a: (a[1], a[0]), eq.tracks[::-1])
    rep.checks["symmetric"] = emptiness(difference(eq_dom, swapped, budget=budget))
    chain = trim(conjoin(3, [(eq_dom, (0, 1)), (eq_dom, (1, 2))], budget=budget))
    rep.checks["transitive"] = emptiness(difference(chain, eq, track_map=(0, 2), budget=budget))
    for name, (arity, auto) in p.relations.items():
        good = True
        for i in range(arity):
            # S(x1..xn) and xi ~ y but not S(x1..y..xn)
            explicit = [(auto, range(arity)), (eq_dom, (i, arity))]
            bad = trim(conjoin(arity + 1, explicit, budget=budget))
            moved = [arity if j == i else j for j in range(arity)]
            if not emptiness(difference(bad, auto, track_map=moved, budget=budget)):
                good = False
                break
        rep.checks[f"congruence {name}"] = good
    clash = conjoin(2, [(eq_dom, (0, 1))], [Distinct(0, 1)], budget=budget)
    is_identity = emptiness(clash)
    rep.checks["injective"] = is_identity or not p.injective
    if not p.injective:
        rep.notes.append("presentation not claimed injective")
    return rep

