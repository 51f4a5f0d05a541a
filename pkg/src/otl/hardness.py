"""Compile normal-form analytical instances into omega-automatic trees.

An instance describes the set of x with

    Q1 X1 ... Qn Xn  exists y  forall z1..zk :  AND_i ( p_i != q_i  or  psi_i )

where the p_i, q_i are polynomials over x, y, z1..zk and every psi_i is a
disjunction of set constraints ``v in Xj`` / ``v notin Xj``.  The compiler
builds, as injective presentations, the forests whose subtrees realise the
reduction: leaf counts come from accepting-run counts of polynomial
automata, and every level of the construction adds fresh roots on top of
countably or continuum many copies of the previous forest, followed by an
unfolding of the resulting dag.

Encodings.  Every domain word is one track of compound atoms.  Roots added
at a level carry a string tag as the first atom component, copies of an
earlier forest carry ``(index_atom, atom)`` pairs, and run words of the
base automaton use atoms ``"t<i>"`` for transition ``i``.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from itertools import product as cartesian

from .automata import (BuchiAutomaton, TrackAlphabet, alphabet_expand,
                       bisimulation_reduce, disjoint_union, flag_intersection, map_symbols, pack,
                       trim, union_all)
from .constructions import (DOLLAR, DOLLAR1, DOLLAR2, VOID, power_aleph0, power_continuum,
                            copy_root, pair_root as pair_node_root, path_root,
                            unfold_dag, unfold_over_forest)
from .lasso import PAD, LassoWord, convolve
from .presentation import Presentation
from .product import Distinct, Equal, conjoin

A, B, C = "a", "b", "c"
BITS = ("0", "1")
MAX_DEFAULT_N = 2


class InstanceError(ValueError):
    pass


# ----------------------------------------------------------------- polynomials

@dataclass(frozen=True)
class Poly:
    """Expression tree over ``1``, variables, ``+`` and ``*``.

    ``op`` is ``"1"``, ``"0"``, ``"var"`` (``var`` holds the index), ``"+"``
    or ``"*"`` (``args`` holds the operands).
    """

    op: str
    var: int = -1
    args: tuple = ()

    def __add__(self, other):
        return Poly("+", args=(self, other))

    def __mul__(self, other):
        return Poly("*", args=(self, other))

    def evaluate(self, values) -> int:
        if self.op == "1":
            return 1
        if self.op == "0":
            return 0
        if self.op == "var":
            return values[self.var]
        vals = [a.evaluate(values) for a in self.args]
        if self.op == "+":
            return sum(vals)
        out = 1
        for v in vals:
            out *= v
        return out

    def monomials(self) -> dict:
        """Normal form: exponent tuple (sorted variable multiset) -> coefficient."""
        if self.op == "1":
            return {(): 1}
        if self.op == "0":
            return {}
        if self.op == "var":
            return {(self.var,): 1}
        parts = [a.monomials() for a in self.args]
        acc = parts[0]
        for nxt in parts[1:]:
            res: dict = {}
            if self.op == "+":
                for d in (acc, nxt):
                    for m, c in d.items():
                        res[m] = res.get(m, 0) + c
            else:
                for m1, c1 in acc.items():
                    for m2, c2 in nxt.items():
                        m = tuple(sorted(m1 + m2))
                        res[m] = res.get(m, 0) + c1 * c2
            acc = res
        return {m: c for m, c in acc.items() if c}

    def is_zero(self) -> bool:
        return not self.monomials()

    def variables(self) -> set:
        if self.op == "var":
            return {self.var}
        return set().union(*(a.variables() for a in self.args)) if self.args else set()


ONE = Poly("1")
ZERO = Poly("0")


def var(i: int) -> Poly:
    return Poly("var", i)


def const(n: int) -> Poly:
    if n < 0:
        raise InstanceError("negative coefficient")
    if n == 0:
        return ZERO
    out = ONE
    for _ in range(n - 1):
        out = out + ONE
    return out


def cantor(u: Poly, v: Poly) -> Poly:
    """``(u+v)^2 + 3u + v``, injective on positive integers with even values."""
    s = u + v
    return s * s + u + u + u + v


def cantor_value(e1: int, e2: int) -> int:
    return (e1 + e2) ** 2 + 3 * e1 + e2


def parse_polynomial(text: str, variables) -> Poly:
    """Parse ``"(x+y)^2+3*x+y"`` over the given variable names."""
    names = {name: i for i, name in enumerate(variables)}
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval").body
    except SyntaxError as exc:
        raise InstanceError(f"cannot parse polynomial {text!r}: {exc.msg}") from None

    def build(node) -> Poly:
        if isinstance(node, ast.BinOp):
            left, right = build(node.left), build(node.right)
            if isinstance(node.op, ast.Add):
                return left + right
            if isinstance(node.op, ast.Mult):
                return left * right
            if isinstance(node.op, ast.Pow):
                if not isinstance(node.right, ast.Constant) or not isinstance(node.right.value, int):
                    raise InstanceError("exponents must be natural number literals")
                n = node.right.value
                if n < 0:
                    raise InstanceError("negative exponent")
                out = ONE
                for _ in range(n):
                    out = left if out is ONE else out * left
                return out
            raise InstanceError(f"unsupported operator in {text!r}")
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return const(node.value)
        if isinstance(node, ast.Name):
            if node.id not in names:
                raise InstanceError(f"unknown variable {node.id!r} in {text!r}")
            return var(names[node.id])
        raise InstanceError(f"unsupported term in {text!r}")

    return build(tree)


def format_polynomial(p: Poly, variables) -> str:
    if p.op in ("0", "1"):
        return p.op
    if p.op == "var":
        return variables[p.var]
    inner = [format_polynomial(a, variables) for a in p.args]
    return "(" + (" + " if p.op == "+" else "*").join(inner) + ")"


# ------------------------------------------------------------ unary shapes

def unary_automaton(symbol: str = A, min_len: int = 1) -> BuchiAutomaton:
    """``symbol^n PAD^omega`` for ``n >= min_len``; deterministic."""
    n = min_len + 2
    trans = [(i, (symbol,), i + 1) for i in range(min_len)]
    trans += [(min_len, (symbol,), min_len), (min_len, (PAD,), min_len + 1),
              (min_len + 1, (PAD,), min_len + 1)]
    return BuchiAutomaton([TrackAlphabet((symbol, PAD), PAD)], n, (0,), (min_len + 1,), trans)


def free_automaton(symbols=BITS) -> BuchiAutomaton:
    return BuchiAutomaton([TrackAlphabet(tuple(symbols))], 1, (0,), (0,),
                          [(0, (s,), 0) for s in symbols])


def unary_word(e: int, symbol: str = A) -> LassoWord:
    return LassoWord.finite([symbol] * e)


def shape_automaton(k: int, symbol: str = A) -> BuchiAutomaton:
    """``(x)_k (symbol^+)``: deterministic, one run per word."""
    return conjoin(k, [(unary_automaton(symbol), (i,)) for i in range(k)])


def _raw_poly(p: Poly, k: int, symbol: str) -> BuchiAutomaton:
    syms = list(cartesian((symbol, PAD), repeat=k))
    tracks = [TrackAlphabet((symbol, PAD), PAD)] * k
    if p.op == "1":
        return BuchiAutomaton(tracks, 1, (0,), (0,), [(0, s, 0) for s in syms], check=False)
    if p.op == "0":
        return BuchiAutomaton(tracks, 0, (), (), (), check=False)
    if p.op == "var":
        if not 0 <= p.var < k:
            raise InstanceError(f"variable index {p.var} outside {k} tracks")
        # guess the position of one symbol on the variable's track
        trans = [(0, s, 0) for s in syms] + [(1, s, 1) for s in syms]
        trans += [(0, s, 1) for s in syms if s[p.var] == symbol]
        return BuchiAutomaton(tracks, 2, (0,), (1,), trans, check=False)
    parts = [_raw_poly(a, k, symbol) for a in p.args]
    acc = parts[0]
    for nxt in parts[1:]:
        acc = disjoint_union(acc, nxt) if p.op == "+" else trim(flag_intersection(acc, nxt))
    return acc


def poly_automaton(p: Poly, k: int, symbol: str = A) -> BuchiAutomaton:
    """Language ``(x)_k(symbol^+)`` with exactly ``p(c)`` accepting runs on ``symbol^c``."""
    if p.is_zero():
        raise InstanceError("the zero polynomial has no automaton")
    raw = trim(_raw_poly(p, k, symbol))
    return trim(conjoin(k, [(raw, range(k)), (shape_automaton(k, symbol), range(k))]))


# ------------------------------------------------------------ set constraints

@dataclass(frozen=True)
class Literal:
    var: str
    positive: bool
    set_index: int  # 1-based

    def to_json(self):
        return [self.var, "in" if self.positive else "notin", self.set_index]


def psi_automaton(literals, n: int, individuals, negate: bool = False,
                  symbol: str = A) -> BuchiAutomaton:
    """Deterministic acceptor of ``w_X1 (x) .. (x) w_Xn (x) symbol^c`` satisfying
    the disjunction ``literals`` (or its negation).

    Tracks: ``n`` set tracks over ``{0,1}`` then one unary track per name in
    ``individuals``.  Words with a malformed individual track used by the
    clause are rejected either way.
    """
    literals = list(literals)
    if not literals:
        raise InstanceError("empty set-constraint clause")
    pos = {name: n + j for j, name in enumerate(individuals)}
    for lit in literals:
        if lit.var not in pos:
            raise InstanceError(f"unknown individual variable {lit.var!r}")
        if not 1 <= lit.set_index <= n:
            raise InstanceError(f"set index {lit.set_index} outside 1..{n}")
    used = sorted({pos[l.var] for l in literals})
    k = n + len(individuals)
    syms = list(cartesian(*([BITS] * n + [(symbol, PAD)] * len(individuals))))

    def holds(bits_at):
        val = any((bits_at[pos[l.var]][l.set_index - 1] == "1") == l.positive for l in literals)
        return val != negate

    # state: tuple over used tracks of (ended, bits at last symbol position) or "acc"
    start = tuple((False, None) for _ in used)
    ids = {start: 0, "acc": 1}
    order = [start, "acc"]
    trans = [(1, s, 1) for s in syms]
    i = 0
    while i < len(order):
        st = order[i]
        if st == "acc":
            i += 1
            continue
        for s in syms:
            nxt = []
            ok = True
            for (ended, bits), t in zip(st, used):
                if s[t] == symbol:
                    if ended:
                        ok = False
                        break
                    nxt.append((False, s[:n]))
                else:
                    if bits is None:
                        ok = False
                        break
                    nxt.append((True, bits))
            if not ok:
                continue
            nxt = tuple(nxt)
            if all(e for e, _ in nxt):
                if not holds({t: b for t, (_, b) in zip(used, nxt)}):
                    continue
                nxt = "acc"
            if nxt not in ids:
                ids[nxt] = len(order)
                order.append(nxt)
            trans.append((i, s, ids[nxt]))
        i += 1
    tracks = [TrackAlphabet(BITS)] * n + [TrackAlphabet((symbol, PAD), PAD)] * len(individuals)
    return trim(BuchiAutomaton(tracks, len(order), (0,), (1,), trans))


def set_word(bits) -> LassoWord:
    """Characteristic word of a set: a lasso over ``"0"``/``"1"`` (position 1 first)."""
    if isinstance(bits, LassoWord):
        return bits
    pre, per = bits
    return LassoWord.of(list(pre), list(per))


def in_set(word: LassoWord, e: int) -> bool:
    return word[e - 1][0] == "1"


# ------------------------------------------------------------ instances

@dataclass(frozen=True)
class Clause:
    p: Poly
    q: Poly
    psi: tuple
    p_text: str = ""
    q_text: str = ""


@dataclass
class NormalFormInstance:
    n: int
    k: int
    clauses: list = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("an instance needs at least one set quantifier")
        if self.k < 0:
            raise InstanceError("k must be natural")
        if not self.clauses:
            raise InstanceError("an instance needs at least one clause")

    @property
    def individuals(self) -> list:
        """Polynomial/clause variables x, y, z1..zk."""
        return ["x", "y"] + [f"z{j}" for j in range(1, self.k + 1)]

    @property
    def tracks(self) -> list:
        """Individual tracks of the clause automata: x, y, z1..zk and the extra summand."""
        return self.individuals + ["z+"]

    @classmethod
    def from_json(cls, data: dict) -> "NormalFormInstance":
        try:
            n, k = int(data["n"]), int(data["k"])
            names = ["x", "y"] + [f"z{j}" for j in range(1, k + 1)]
            clauses = []
            for c in data["clauses"]:
                lits = []
                for v, pol, j in c["psi"]:
                    if pol not in ("in", "notin"):
                        raise InstanceError(f"polarity must be 'in' or 'notin', got {pol!r}")
                    lits.append(Literal(str(v), pol == "in", int(j)))
                clauses.append(Clause(parse_polynomial(str(c["p"]), names),
                                      parse_polynomial(str(c["q"]), names),
                                      tuple(lits), str(c["p"]), str(c["q"])))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InstanceError):
                raise
            raise InstanceError(f"malformed instance: {exc}") from None
        inst = cls(n, k, clauses)
        for c in inst.clauses:
            for lit in c.psi:
                if lit.var not in names:
                    raise InstanceError(f"unknown individual variable {lit.var!r}")
                if not 1 <= lit.set_index <= n:
                    raise InstanceError(f"set index {lit.set_index} outside 1..{n}")
        return inst

    @classmethod
    def load(cls, path) -> "NormalFormInstance":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def to_json(self) -> dict:
        names = self.individuals
        return {"n": self.n, "k": self.k, "clauses": [
            {"p": c.p_text or format_polynomial(c.p, names),
             "q": c.q_text or format_polynomial(c.q, names),
             "psi": [l.to_json() for l in c.psi]} for c in self.clauses]}

    def psi_holds(self, i: int, sets, values: dict) -> bool:
        """Direct evaluation of clause ``i`` (1-based); ``sets`` are lasso words."""
        return any(in_set(set_word(sets[l.set_index - 1]), values[l.var]) == l.positive
                   for l in self.clauses[i - 1].psi)

    def expected_leaves(self, i: int, sets, values: dict, extra: int) -> int:
        """Leaf count of the base-forest root for clause ``i``: 14 or C(p+z, q+z)."""
        if self.psi_holds(i, sets, values):
            return cantor_value(1, 2)
        vals = [values[v] for v in self.individuals]
        c = self.clauses[i - 1]
        return cantor_value(c.p.evaluate(vals) + extra, c.q.evaluate(vals) + extra)


def clause_automaton(inst: NormalFormInstance, i: int) -> BuchiAutomaton:
    """Automaton over ``w_X (x) a^(x,y,z,z+)`` with 14 runs when psi_i holds and
    ``C(p_i+z+, q_i+z+)`` runs otherwise."""
    if not 1 <= i <= len(inst.clauses):
        raise IndexError(f"clause index {i} outside 1..{len(inst.clauses)}")
    c = inst.clauses[i - 1]
    names = inst.tracks
    m = len(names)
    extra = var(m - 1)
    counts = poly_automaton(cantor(c.p + extra, c.q + extra), m)
    for _ in range(inst.n):
        counts = alphabet_expand(TrackAlphabet(BITS), counts)
    yes = psi_automaton(c.psi, inst.n, names)
    no = psi_automaton(c.psi, inst.n, names, negate=True)
    parts = [trim(flag_intersection(no, counts))] + [yes] * cantor_value(1, 2)
    auto = union_all(parts)
    k = inst.n + m
    shape = [(unary_automaton(), (inst.n + j,)) for j in range(m)]
    return trim(conjoin(k, [(auto, range(k))] + shape))


# ------------------------------------------------------------ base forest

def _index_word(i: int) -> LassoWord:
    return LassoWord.finite([str(i)])


def clause_root(inst: NormalFormInstance, i: int, sets, values: dict, extra: int) -> LassoWord:
    """Root word ``i (x) w_X (x) a^(x,y,z,z+)`` of the base forest."""
    words = [_index_word(i)] + [set_word(s) for s in sets]
    words += [unary_word(values[v]) for v in inst.individuals] + [unary_word(extra)]
    return convolve(words).pack()


def pair_root(e1: int, e2: int) -> LassoWord:
    return convolve([unary_word(e1, B), unary_word(e2, B)]).pack()


def marker_root(e: int) -> LassoWord:
    return convolve([unary_word(e, C)]).pack()


def run_atom(i: int) -> str:
    return f"t{i}"


def _index_automaton(i: int) -> BuchiAutomaton:
    return BuchiAutomaton([TrackAlphabet((str(i), PAD), PAD)], 2, (0,), (1,),
                          [(0, (str(i),), 1), (1, (PAD,), 1)])


def base_automaton(inst: NormalFormInstance, markers: bool = False) -> BuchiAutomaton:
    """One-track automaton over packed atoms whose run counts are the leaf counts.

    Clause ``i`` contributes ``i (x) A_i``, the pairs ``b^(e1,e2)`` the
    automaton of ``C`` and, with ``markers``, ``c^e`` the automaton of ``2e+1``.
    """
    parts = []
    for i in range(1, len(inst.clauses) + 1):
        a_i = clause_automaton(inst, i)
        k = a_i.arity + 1
        parts.append(pack(trim(conjoin(k, [(_index_automaton(i), (0,)), (a_i, range(1, k))]))))
    parts.append(pack(poly_automaton(cantor(var(0), var(1)), 2, B)))
    if markers:
        parts.append(pack(poly_automaton(var(0) + var(0) + ONE, 1, C)))
    return trim(union_all(parts))


def base_language(inst: NormalFormInstance, markers: bool = False) -> BuchiAutomaton:
    """Small automaton for ``L(base_automaton)``: every well-formed word has a run."""
    parts = []
    m = len(inst.tracks)
    for i in range(1, len(inst.clauses) + 1):
        factors = [(_index_automaton(i), (0,))]
        factors += [(free_automaton(), (1 + j,)) for j in range(inst.n)]
        factors += [(unary_automaton(), (1 + inst.n + j,)) for j in range(m)]
        parts.append(pack(conjoin(1 + inst.n + m, factors)))
    parts.append(pack(shape_automaton(2, B)))
    if markers:
        parts.append(pack(shape_automaton(1, C)))
    return bisimulation_reduce(union_all(parts))


def run_forest(auto: BuchiAutomaton, language: BuchiAutomaton | None = None) -> Presentation:
    """Height-1 forest ``L(A) u Run_A`` with an edge from each word to its accepting runs.

    ``language`` may supply a smaller automaton for ``L(A)``.
    """
    auto = trim(auto)
    edges = [(p, (a[0], run_atom(i)), q) for i, (p, a, q) in enumerate(auto.transitions)]
    e = BuchiAutomaton.build(auto.n_states, auto.initial, auto.accepting, edges, tracks=2)
    runs = BuchiAutomaton.build(auto.n_states, auto.initial, auto.accepting,
                                [(p, (s[1],), q) for p, s, q in edges], tracks=1)
    domain = disjoint_union(language if language is not None else auto, runs)
    return Presentation(domain.tracks[0], domain, None, {"E": (2, e)}, True)


def build_base_forest(inst: NormalFormInstance, markers: bool = False) -> Presentation:
    """Base forest: below every accepted word hang its accepting runs as leaves."""
    return run_forest(base_automaton(inst, markers), base_language(inst, markers))


# ------------------------------------------------------------ dag levels

@dataclass
class Level:
    """A forest of the chain, the automaton of its root nodes and its node encoding.

    ``root_of`` maps a node atom to the atom of its root at the same
    position; ``root_atom`` turns an atom of a dag root into the atom of the
    corresponding root node.
    """

    name: str
    forest: Presentation
    roots: BuchiAutomaton
    height: int
    sizes: dict = field(default_factory=dict)
    root_of: Callable = path_root
    root_atom: Callable | None = None

    def root_node(self, word: LassoWord) -> LassoWord:
        """Root node of the forest for the dag root ``word`` (one track)."""
        return LassoWord([(self._atom(s[0]),) for s in word.prefix],
                         [(self._atom(s[0]),) for s in word.period])

    def _atom(self, a):
        if self.root_atom is not None:
            return self.root_atom(a)
        return (a,) + (VOID,) * self.height


def _word_automaton(w: LassoWord) -> BuchiAutomaton:
    n = w.positions()
    atoms = tuple(dict.fromkeys(s[0] for s in w.prefix + w.period))
    track = TrackAlphabet(atoms, PAD if PAD in atoms else None)
    return BuchiAutomaton([track], n, (0,), range(n),
                          [(i, w[i], w.next_position(i)) for i in range(n)], check=False)


def _relation(ntracks, explicit, left, right, lazy=(), budget=None) -> BuchiAutomaton:
    """Conjoin the factors and map every symbol to the packed pair ``(left(s), right(s))``."""
    prod = trim(conjoin(ntracks, explicit, lazy, budget=budget))
    return map_symbols(prod, lambda s: (left(s), right(s)), 2)


def _language(ntracks, explicit, atom, budget=None) -> BuchiAutomaton:
    prod = trim(conjoin(ntracks, explicit, budget=budget))
    return map_symbols(prod, lambda s: (atom(s),), 1)


def _dag(roots: BuchiAutomaton, edges: list, base: Presentation) -> Presentation:
    domain = bisimulation_reduce(disjoint_union(roots, base.domain))
    e = bisimulation_reduce(union_all(edges + [base.relation("E")]))
    return Presentation(domain.tracks[0], domain, None, {"E": (2, e)}, True)


def _ge_automaton(symbol: str = B) -> BuchiAutomaton:
    """Two unary tracks with ``len(track0) <= len(track1)`` (shapes checked elsewhere)."""
    syms = [(symbol, symbol), (PAD, symbol), (PAD, PAD)]
    return BuchiAutomaton.build(1, (0,), (0,), [(0, s, 0) for s in syms], tracks=2)


def _pair_edges(left_factors, left_atom, copy_track: int, m_track: int | None = None,
                budget=None) -> BuchiAutomaton:
    """Edges from roots to ``$^i (x) b^(e1,e2)``.

    ``copy_track`` holds the ``$``-index, the pair sits on the two tracks
    after it.  Without ``m_track`` the pairs are those with ``e1 != e2``;
    with it, those with ``e1 = e2 >= m`` where ``b^m`` is on ``m_track``.
    """
    b1, b2 = copy_track + 1, copy_track + 2
    factors = list(left_factors) + [(_dollar_star(), (copy_track,)),
                                    (unary_automaton(B), (b1,)), (unary_automaton(B), (b2,))]
    if m_track is None:
        lazy = [Distinct(b1, b2)]
    else:
        factors.append((_ge_automaton(), (m_track, b1)))
        lazy = [Equal(b1, b2)]
    return _relation(b2 + 1, factors, left_atom,
                     lambda s: (s[copy_track], (s[b1], s[b2])), lazy, budget)


def _dollar_star() -> BuchiAutomaton:
    return unary_automaton(DOLLAR, 0)


def _continuum_index() -> BuchiAutomaton:
    return free_automaton((DOLLAR1, DOLLAR2))


def _clause_index_automaton(ell: int) -> BuchiAutomaton:
    names = tuple(str(i) for i in range(1, ell + 1))
    trans = [(0, (s,), 1) for s in names] + [(1, (PAD,), 1)]
    return BuchiAutomaton([TrackAlphabet(names + (PAD,), PAD)], 2, (0,), (1,), trans)


def tagged(tag: str, words) -> LassoWord:
    """One-track word with atoms ``(tag, c1, .., cj)`` from the convolution of ``words``."""
    w = convolve(list(words))
    return LassoWord([((tag,) + s,) for s in w.prefix], [((tag,) + s,) for s in w.period])


def build_pair_dag(inst: NormalFormInstance, base: Presentation, markers: bool = False,
                   budget=None) -> tuple[Presentation, BuchiAutomaton]:
    """The height-2 dag over countably many copies of the base forest.

    New roots are ``w_X (x) a^(x,y)`` (tag ``"T"``) and ``b^m`` with
    ``m >= 0`` (tag ``"B"``).  With ``markers`` (exactly one set variable)
    the ``b^m`` roots also carry ``w_X`` and every new root points to the
    copies of the markers ``c^e`` with ``e in X``.
    """
    n = inst.n
    if markers and n != 1:
        raise InstanceError("the marker construction needs exactly one set variable")
    power = power_aleph0(base)
    sets = [(free_automaton(), (j,)) for j in range(n)]
    t_left = sets + [(unary_automaton(), (n,)), (unary_automaton(), (n + 1,))]
    t_width = n + 2
    t_atom = lambda s: ("T",) + tuple(s[:t_width])
    b_sets = sets if markers else []
    bm = len(b_sets)
    b_width = bm + 1
    b_atom = lambda s: ("B",) + tuple(s[:b_width])
    b_any = b_sets + [(unary_automaton(B, 0), (bm,))]
    b_pos = b_sets + [(unary_automaton(B, 1), (bm,))]
    roots = bisimulation_reduce(disjoint_union(_language(t_width, t_left, t_atom, budget),
                                               _language(b_width, b_any, b_atom, budget)))
    edges = []
    # clause roots  i (x) w_X (x) a^(x,y) (x) a^(z1..zk, z+)
    d, idx = t_width, t_width + 1
    zs = [idx + 1 + j for j in range(inst.k + 1)]
    factors = t_left + [(_dollar_star(), (d,)), (_clause_index_automaton(len(inst.clauses)), (idx,))]
    factors += [(unary_automaton(), (z,)) for z in zs]
    edges.append(_relation(
        zs[-1] + 1, factors, t_atom,
        lambda s: (s[d], (s[idx],) + tuple(s[:t_width]) + tuple(s[z] for z in zs)), budget=budget))
    # pairs: e1 != e2 below every new root, e1 = e2 >= m below b^m
    edges.append(_pair_edges(t_left, t_atom, t_width, budget=budget))
    edges.append(_pair_edges(b_any, b_atom, b_width, budget=budget))
    edges.append(_pair_edges(b_pos, b_atom, b_width, m_track=bm, budget=budget))
    if markers:
        member = psi_automaton([Literal("e", True, 1)], 1, ["e"], symbol=C)
        for left, atom, width in ((t_left, t_atom, t_width), (b_any, b_atom, b_width)):
            dd, cc = width, width + 1
            factors = left + [(_dollar_star(), (dd,)), (member, (0, cc))]
            edges.append(_relation(width + 2, factors, atom,
                                   lambda s, dd=dd, cc=cc: (s[dd], (s[cc],)), budget=budget))
    return _dag(roots, edges, power), roots


def _root_paths(roots: BuchiAutomaton, k: int) -> BuchiAutomaton:
    """Unfolding nodes of one-element paths: atoms ``(a, VOID, .., VOID)``."""
    return map_symbols(roots, lambda s: ((s[0],) + (VOID,) * k,), 1)


def _unfold_level(name: str, dag: Presentation, roots: BuchiAutomaton, k: int, budget=None,
                  sizes=None) -> Level:
    forest = unfold_dag(dag, k, roots, budget=budget)
    info = dict(sizes or {})
    info.update({"dag": dag.sizes(), "forest": forest.sizes()})
    return Level(name, forest, bisimulation_reduce(_root_paths(roots, k)), k, info)


def build_pair_forest(inst: NormalFormInstance, markers: bool = False, budget=None) -> Level:
    """Height-2 forest whose ``b^m`` trees have the pair blocks ``e1 != e2 or e1 = e2 >= m``."""
    base = build_base_forest(inst, markers)
    dag, roots = build_pair_dag(inst, base, markers, budget)
    return _unfold_level("pair", dag, roots, 2, budget, {"base": base.sizes()})


def _pair_atom(a):
    return (a, VOID)


def _copy_level(name: str, prev: Level, power: Presentation, roots: BuchiAutomaton,
                edges: list, budget=None, only: LassoWord | None = None) -> Level:
    """Unfold new ``roots`` above copies of ``prev`` (``power``) into a forest.

    Only the new roots share children, so the unfolding pairs each node with
    its root instead of spelling out whole paths.  With ``only`` the result
    is the single tree below that root.
    """
    root_edges = bisimulation_reduce(union_all(edges))
    if only is not None:
        single = _word_automaton(only)
        roots = trim(conjoin(1, [(roots, (0,)), (single, (0,))], budget=budget))
        root_edges = bisimulation_reduce(conjoin(2, [(root_edges, (0, 1)), (single, (0,))],
                                                 budget=budget))
    forest = unfold_over_forest(roots, root_edges, power, copy_root(prev.root_of), budget)
    info = {"previous": prev.sizes, "root edges": root_edges.n_states, "forest": forest.sizes()}
    return Level(name, forest, bisimulation_reduce(map_symbols(roots, lambda s: ((s[0], VOID),), 1)),
                 prev.height + 1, info, pair_node_root, _pair_atom)


def node(words, k: int) -> LassoWord:
    """Unfolding node for the dag path ``words`` (one-track words, at most ``k+1``)."""
    if not 1 <= len(words) <= k + 1:
        raise ValueError("path length outside 1..k+1")
    void = LassoWord([], [(VOID,)])
    return convolve(list(words) + [void] * (k + 1 - len(words))).pack()


def copy_word(word: LassoWord, index: LassoWord) -> LassoWord:
    """Node ``index (x) word`` of a power presentation (one-track words)."""
    return convolve([index, word]).pack()


def dollar_index(i: int) -> LassoWord:
    return unary_word(i, DOLLAR)


def _single(word: LassoWord) -> BuchiAutomaton:
    return _word_automaton(word)


def _unary_upto(m: int, symbol: str = B) -> BuchiAutomaton:
    """Words ``symbol^j PAD^omega`` with ``j <= m``."""
    return bisimulation_reduce(union_all([_single(unary_word(j, symbol)) for j in range(m + 1)]))


def _zero_level(inst: NormalFormInstance, pair: Level, budget=None, only=None) -> Level:
    """``H_0``: roots ``w_X (x) a^x`` (tag ``"T0"``) and ``eps``, ``b`` (tag ``"U0"``)."""
    n = inst.n
    power = power_aleph0(pair.forest)
    sets = [(free_automaton(), (j,)) for j in range(n)]
    t_left = sets + [(unary_automaton(), (n,))]
    t_atom = lambda s: ("T0",) + tuple(s[:n + 1])
    u_atom = lambda s: ("U0", s[0])
    upto_b = _unary_upto(1)
    roots = bisimulation_reduce(disjoint_union(_language(n + 1, t_left, t_atom, budget),
                                               _language(1, [(upto_b, (0,))], u_atom, budget)))
    ra = pair._atom
    d = n + 1
    edges = []
    factors = t_left + [(_dollar_star(), (d,)), (unary_automaton(), (d + 1,))]
    edges.append(_relation(d + 2, factors, t_atom,
                           lambda s: (s[d], ra(("T",) + tuple(s[:n + 1]) + (s[d + 1],))),
                           budget=budget))
    factors = t_left + [(_dollar_star(), (d,)), (unary_automaton(B, 1), (d + 1,))]
    edges.append(_relation(d + 2, factors, t_atom,
                           lambda s: (s[d], ra(("B", s[d + 1]))), budget=budget))
    for m, min_len in ((0, 0), (1, 1)):
        factors = [(_single(unary_word(m, B)), (0,)), (_dollar_star(), (1,)),
                   (unary_automaton(B, min_len), (2,))]
        edges.append(_relation(3, factors, u_atom,
                               lambda s: (s[1], ra(("B", s[2]))), budget=budget))
    return _copy_level("H0", pair, power, roots, edges, budget, only)


def _next_level(prev: Level, n: int, m: int, budget=None, only=None) -> Level:
    """``H_{m+1}`` from ``H_m``: continuum many copies below new roots, then unfolded."""
    alpha = m % 2
    power = power_continuum(prev.forest)
    tag, ptag = f"T{m + 1}", f"T{m}"
    utag, putag = f"U{m + 1}", f"U{m}"
    nsets = n - m - 1
    sets = [(free_automaton(), (j,)) for j in range(nsets)]
    t_left = sets + [(unary_automaton(), (nsets,))]
    t_atom = lambda s: (tag,) + tuple(s[:nsets + 1])
    u_atom = lambda s: (utag, s[0])
    roots = bisimulation_reduce(disjoint_union(
        _language(nsets + 1, t_left, t_atom, budget),
        _language(1, [(_unary_upto(1), (0,))], u_atom, budget)))
    ra = prev._atom
    d = nsets + 1
    edges = []
    # w_X (x) a^x  ->  index (x) (w_X (x) w_X' (x) a^x)  for every set X'
    factors = t_left + [(_continuum_index(), (d,)), (free_automaton(), (d + 1,))]
    edges.append(_relation(
        d + 2, factors, t_atom,
        lambda s: (s[d], ra((ptag,) + tuple(s[:nsets]) + (s[d + 1], s[nsets]))),
        budget=budget))
    # every new root also points to the copies of b^alpha; eps and b to their namesakes
    factors = t_left + [(_continuum_index(), (d,)), (_single(unary_word(alpha, B)), (d + 1,))]
    edges.append(_relation(d + 2, factors, t_atom,
                           lambda s: (s[d], ra((putag, s[d + 1]))), budget=budget))
    for own in (0, 1):
        targets = bisimulation_reduce(union_all([_single(unary_word(j, B))
                                                 for j in sorted({own, alpha})]))
        factors = [(_single(unary_word(own, B)), (0,)), (_continuum_index(), (1,)),
                   (targets, (2,))]
        edges.append(_relation(3, factors, u_atom,
                               lambda s: (s[1], ra((putag, s[2]))), budget=budget))
    return _copy_level(f"H{m + 1}", prev, power, roots, edges, budget, only)


def _check_size(inst: NormalFormInstance, allow_large: bool):
    if inst.n > MAX_DEFAULT_N and not allow_large:
        raise InstanceError(f"n = {inst.n} exceeds the desk-scale limit {MAX_DEFAULT_N}")


def _build_level(inst: NormalFormInstance, below: list, budget=None, only=None) -> Level:
    """Next level on top of the levels ``below`` (the pair forest first)."""
    if len(below) == 1:
        return _zero_level(inst, below[0], budget, only)
    return _next_level(below[-1], inst.n, len(below) - 2, budget, only)


def build_level_chain(inst: NormalFormInstance, budget=None, allow_large: bool = False,
                      upto: int | None = None) -> list:
    """Forests ``H'', H_0, .., H_upto`` of the full construction (heights 2, 3, ..).

    ``upto`` defaults to n, the last level.
    """
    _check_size(inst, allow_large)
    last = inst.n if upto is None else upto
    levels = [build_pair_forest(inst, False, budget)]
    for _ in range(last + 1):
        levels.append(_build_level(inst, levels, budget))
    return levels


def level_word(m: int, kind: str, sets=(), x: int = 0, b: int = 0) -> LassoWord:
    """Dag root of level ``H_m``: ``kind`` ``"T"`` (sets, x) or ``"U"`` (``b^b``, b in {0,1})."""
    if kind == "T":
        return tagged(f"T{m}", [set_word(s) for s in sets] + [unary_word(x)])
    return tagged(f"U{m}", [unary_word(b, B)])


def level_root(level: Level, kind: str, sets=(), x: int = 0, m: int = 0) -> LassoWord:
    """Root node of a chain level: ``kind`` ``"T"`` (sets, x) or ``"U"`` (``b^m``, m in {0,1})."""
    return level.root_node(level_word(int(level.name[1:]), kind, sets, x, m))


@dataclass
class InstanceTrees:
    trees: dict
    levels: list
    roots: dict

    def sizes(self) -> dict:
        out = {lv.name: lv.sizes for lv in self.levels}
        out.update({f"tree {k}": t.sizes() for k, t in self.trees.items()})
        return out


def emit_instance_trees(inst: NormalFormInstance, x: int, budget=None,
                        allow_large: bool = False) -> InstanceTrees:
    """``T`` (rooted at ``a^x``), ``U0`` (rooted at eps) and ``U1`` (rooted at ``b``) of height n+3.

    The levels below the top are built whole; each top tree is unfolded
    from its own root only.
    """
    if x < 1:
        raise InstanceError("x must be a positive integer")
    _check_size(inst, allow_large)
    n = inst.n
    levels = build_level_chain(inst, budget, allow_large, upto=n - 1)
    words = {"T": level_word(n, "T", (), x), "U0": level_word(n, "U", b=0),
             "U1": level_word(n, "U", b=1)}
    trees, roots = {}, {}
    for k, w in words.items():
        top = _build_level(inst, levels, budget, only=w)
        trees[k] = top.forest
        roots[k] = top.root_node(w)
    return InstanceTrees(trees, levels, roots)


def build_height3_trees(inst: NormalFormInstance, x: int, budget=None) -> InstanceTrees:
    """Height-3 trees ``T`` (rooted at ``a^x``) and ``U`` (rooted at eps).

    Built from the base forest with odd markers ``c^e`` (``2e+1`` leaves),
    the height-2 dag whose roots carry ``w_X``, and a last level of
    countably many copies below the roots ``a^j``.
    """
    if inst.n != 1:
        raise InstanceError("the height-3 construction needs exactly one set variable")
    if x < 1:
        raise InstanceError("x must be a positive integer")
    pair = build_pair_forest(inst, True, budget)
    power = power_aleph0(pair.forest)
    atom = lambda s: ("A", s[0])
    roots = bisimulation_reduce(_language(1, [(unary_automaton(A, 0), (0,))], atom, budget))
    ra = pair._atom
    edges = []
    # a^x -> $^i (x) (w_X (x) b^+)  and  $^i (x) (w_X (x) a^x (x) a^+)
    factors = [(unary_automaton(), (0,)), (_dollar_star(), (1,)), (free_automaton(), (2,)),
               (unary_automaton(), (3,))]
    edges.append(_relation(4, factors, atom,
                           lambda s: (s[1], ra(("T", s[2], s[0], s[3]))), budget=budget))
    for left, min_len in ((unary_automaton(), 1), (_single(unary_word(0)), 0)):
        factors = [(left, (0,)), (_dollar_star(), (1,)), (free_automaton(), (2,)),
                   (unary_automaton(B, min_len), (3,))]
        edges.append(_relation(4, factors, atom,
                               lambda s: (s[1], ra(("B", s[2], s[3]))), budget=budget))
    trees, r = {}, {}
    for k, w in (("T", tagged("A", [unary_word(x)])), ("U", tagged("A", [unary_word(0)]))):
        level = _copy_level("H0", pair, power, roots, edges, budget, only=w)
        trees[k] = level.forest
        r[k] = level.root_node(w)
    return InstanceTrees(trees, [pair], r)
