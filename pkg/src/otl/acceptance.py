"""The ten acceptance checks, runnable from tests and from ``otl selftest``.

Each check returns a :class:`Outcome`; nothing here raises on a failed
check, so a report always covers every criterion that was asked for.
"""

from __future__ import annotations

import itertools
import os
import random
import tempfile
import time
from dataclasses import dataclass, field

from .automata import BuchiAutomaton, TrackAlphabet, disjoint_union, flag_intersection, member
from .cardinality import ALEPH0, CONTINUUM, Finite, cardinal_sum, count_accepting_runs, \
    enumerate_members, language_cardinality
from .constructions import (copy_slice, power_aleph0, power_continuum, roots_automaton, root_path,
                            strip_copy, subtree, unfold_dag)
from .corpus import (FIXED_SETS, TAUTOLOGY, diamond, height1_corpus, language_suite, star,
                     two_clause_instance)
from .hardness import (B, build_base_forest, build_pair_forest, cantor, clause_root, copy_word,
                       dollar_index, marker_root, node, pair_root, poly_automaton, set_word,
                       tagged, unary_word, var)
from .lasso import LassoWord, all_lassos
from .parity import complement, difference, to_deterministic_parity
from .presentation import validate_presentation
from .trees import check_forest_height, iso_height1, iso_height2, leaf_cardinality, leaves

SYMBOLS = ("a", "b")


@dataclass
class Outcome:
    number: int
    title: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number} [{status}] {self.title}: {self.detail} ({self.seconds:.1f}s)"


def default_seed() -> int:
    return int(os.environ.get("OTL_SEED", "0"))


def random_automaton(rng: random.Random, max_states: int = 4, symbols=SYMBOLS) -> BuchiAutomaton:
    n = rng.randint(1, max_states)
    trans = {(p, (a,), q) for p in range(n) for a in symbols for q in range(n)
             if rng.random() < 0.35}
    init = [q for q in range(n) if rng.random() < 0.4] or [0]
    acc = [q for q in range(n) if rng.random() < 0.5]
    return BuchiAutomaton([TrackAlphabet(tuple(symbols))], n, init, acc, sorted(trans))


def random_lasso(rng: random.Random, max_prefix: int = 3, max_period: int = 3,
                 symbols=SYMBOLS) -> LassoWord:
    pre = [rng.choice(symbols) for _ in range(rng.randint(0, max_prefix))]
    per = [rng.choice(symbols) for _ in range(rng.randint(1, max_period))]
    return LassoWord.of(pre, per)


def _product(c1, c2):
    if c1 == Finite(0) or c2 == Finite(0):
        return Finite(0)
    if c1.finite and c2.finite:
        return Finite(c1.n * c2.n)
    return CONTINUUM if CONTINUUM in (c1, c2) else ALEPH0


def _timed(number, title):
    def wrap(fn):
        def run(*args, **kwargs):
            t = time.perf_counter()
            try:
                out = fn(*args, **kwargs)
            except Exception as exc:  # a crash is a failed criterion, not a crashed report
                out = Outcome(number, title, False, f"raised {type(exc).__name__}: {exc}")
            out.number, out.title = number, title
            out.seconds = time.perf_counter() - t
            return out
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


@_timed(1, "polynomial run counts")
def criterion_1(seed=None) -> Outcome:
    m = poly_automaton(cantor(var(0), var(1)), 2)
    bad = []
    t = time.perf_counter()
    for e1, e2 in itertools.product(range(1, 5), repeat=2):
        w = LassoWord([("a" if i < e1 else "⋄", "a" if i < e2 else "⋄") for i in range(max(e1, e2))],
                      [("⋄", "⋄")])
        want = (e1 + e2) ** 2 + 3 * e1 + e2
        got = count_accepting_runs(m, w)
        if got != Finite(want):
            bad.append((e1, e2, got, want))
    elapsed = time.perf_counter() - t
    ok = not bad and elapsed < 30
    return Outcome(0, "", ok, f"16 pairs, {len(bad)} mismatches, {elapsed:.1f}s of 30s", failures=bad)


@_timed(2, "run-count algebra")
def criterion_2(seed=None) -> Outcome:
    rng = random.Random(default_seed() if seed is None else seed)
    bad = []
    for trial in range(100):
        m0, m1 = random_automaton(rng), random_automaton(rng)
        w = random_lasso(rng)
        c0, c1 = count_accepting_runs(m0, w), count_accepting_runs(m1, w)
        s = count_accepting_runs(disjoint_union(m0, m1), w)
        p = count_accepting_runs(flag_intersection(m0, m1), w)
        if s != cardinal_sum([c0, c1]) or p != _product(c0, c1):
            bad.append((trial, str(w), c0, c1, s, p))
    return Outcome(0, "", not bad, f"100 random pairs, {len(bad)} failures", failures=bad)


@_timed(3, "complement and determinization oracle")
def criterion_3(seed=None) -> Outcome:
    rng = random.Random(default_seed() if seed is None else seed)
    words = list(all_lassos(SYMBOLS, 3, 3))
    bad = []
    for trial in range(100):
        m = random_automaton(rng)
        comp = complement(m)
        dpa = to_deterministic_parity(m)
        for w in words:
            inside = member(m, w)
            if member(comp, w) == inside or dpa.member(w) != inside:
                bad.append((trial, str(w)))
    return Outcome(0, "", not bad, f"100 automata x {len(words)} lassos, {len(bad)} failures",
                   failures=bad)


@_timed(4, "cardinality trichotomy")
def criterion_4(seed=None) -> Outcome:
    bad = []
    for name, m, want in language_suite():
        got = language_cardinality(m)
        if got != want:
            bad.append((name, got, want))
        elif want.finite and len(enumerate_members(m, 6)) != want.n:
            bad.append((name, "enumeration", want))
    return Outcome(0, "", not bad, f"15 languages, {len(bad)} errors", failures=bad)


@_timed(5, "height-1 isomorphism")
def criterion_5(seed=None) -> Outcome:
    bad = []
    for name, p1, p2, truth in height1_corpus():
        if iso_height1(p1, p2) != truth:
            bad.append(name)
    return Outcome(0, "", not bad, f"10 pairs, {len(bad)} disagreements", failures=bad)


def pair_tree(level, m: int):
    """Subtree of the pair forest below the root ``b^m``."""
    root = node([tagged("B", [unary_word(m, B)])], 2)
    return subtree(level.forest, root, 2)


@_timed(6, "height-2 refutation")
def criterion_6(seed=None) -> Outcome:
    from .hardness import NormalFormInstance
    level = build_pair_forest(NormalFormInstance.from_json(TAUTOLOGY))
    u1, u2 = pair_tree(level, 1), pair_tree(level, 2)
    verdict = iso_height2(u1, u2, 8)
    same = iso_height2(u1, pair_tree(level, 1), 8)
    ok = (verdict.kind == "NonIsomorphic" and verdict.witness == Finite(8)
          and same.kind in ("Isomorphic", "ConsistentUpTo"))
    return Outcome(0, "", ok, f"U''[1] vs U''[2]: {verdict}; U''[1] vs itself: {same}")


def _arith(text: str, env: dict) -> int:
    """Plain evaluation of a polynomial term, independent of the compiler's parser."""
    return eval(text.replace("^", "**"), {"__builtins__": {}}, dict(env))  # noqa: S307


def _holds(psi, sets, env) -> bool:
    for name, rel, idx in psi:
        bit = sets[idx - 1][env[name] - 1] == "1"
        if bit == (rel == "in"):
            return True
    return False


def _bits(pre: str, per: str, n: int = 8) -> str:
    return (pre + per * n)[:n]


@_timed(7, "clause-automaton semantics")
def criterion_7(seed=None) -> Outcome:
    inst = two_clause_instance()
    forest = build_base_forest(inst)
    raw = inst.to_json()
    bad = []
    checked = 0
    for i, clause in enumerate(raw["clauses"], 1):
        for pre, per in FIXED_SETS:
            X = set_word((pre, per))
            bits = [_bits(pre, per)]
            for x, y, z, zp in itertools.product(range(1, 4), repeat=4):
                env = {"x": x, "y": y, "z1": z}
                if _holds(clause["psi"], bits, env):
                    want = 14
                else:
                    p, q = _arith(clause["p"], env) + zp, _arith(clause["q"], env) + zp
                    want = (p + q) ** 2 + 3 * p + q
                got = leaf_cardinality(forest, clause_root(inst, i, [X], env, zp))
                checked += 1
                if got != Finite(want):
                    bad.append((i, (pre, per), env, zp, got, want))
    return Outcome(0, "", not bad, f"{checked} roots, {len(bad)} mismatches", failures=bad)


def marker_node(root: LassoWord, kind: str, h2_words, e: int, i: int = 0,
                j: int = 0) -> LassoWord:
    """Node of the height-3 tree at ``root``: copy ``j`` of the pair-level node for ``c^e``."""
    inner = node([tagged(kind, h2_words), copy_word(marker_root(e), dollar_index(i))], 2)
    return copy_word(copy_word(inner, dollar_index(j)), root)


def block_node(root: LassoWord, kind: str, h2_words, e1: int, e2: int, i: int = 0,
               j: int = 0) -> LassoWord:
    inner = node([tagged(kind, h2_words), copy_word(pair_root(e1, e2), dollar_index(i))], 2)
    return copy_word(copy_word(inner, dollar_index(j)), root)


def check_height3(trees: dict, x: int = 1) -> tuple[bool, list]:
    """Validation, height and leaf-count parity checks on ``{"T": .., "U": ..}`` built for ``x``."""
    notes = []
    ok = True
    for name, tree in trees.items():
        valid = validate_presentation(tree).ok and tree.injective
        height = check_forest_height(tree, 3)
        notes.append(f"{name}: valid={valid} height3={height}")
        ok &= valid and height
    everything = set_word(("", "1"))
    parents = {"T": (unary_word(x), "T", [everything, unary_word(x), unary_word(2)]),
               "U": (unary_word(0), "B", [everything, unary_word(1, B)])}
    for name, (r, kind, words) in parents.items():
        root = tagged("A", [r])
        for e in (1, 2, 3):
            c = leaf_cardinality(trees[name], marker_node(root, kind, words, e, 1, 2))
            good = c == Finite(2 * e + 1)
            notes.append(f"{name} marker c^{e}: {c!r}")
            ok &= good
        for e1, e2 in ((1, 2), (2, 1), (1, 3)):
            c = leaf_cardinality(trees[name], block_node(root, kind, words, e1, e2))
            notes.append(f"{name} block ({e1},{e2}): {c!r}")
            ok &= c.finite and c.n % 2 == 0
    return ok, notes


@_timed(8, "end-to-end height-3 build")
def criterion_8(seed=None) -> Outcome:
    import json
    from . import cli
    from .io import load_presentation
    with tempfile.TemporaryDirectory() as tmp:
        inst_path = os.path.join(tmp, "taut.json")
        with open(inst_path, "w", encoding="utf-8") as fh:
            json.dump(TAUTOLOGY, fh)
        out = os.path.join(tmp, "out")
        t = time.perf_counter()
        code = cli.main(["compile", "--mode", "height3", "--x", "1", "--out", out, inst_path],
                        quiet=True)
        build = time.perf_counter() - t
        if code != 0:
            return Outcome(0, "", False, f"otl compile exited with {code}")
        trees = {k: load_presentation(os.path.join(out, f"{k}.json")) for k in ("T", "U")}
    ok, notes = check_height3(trees)
    total = time.perf_counter() - t
    ok &= total < 300
    return Outcome(0, "", ok, f"compile {build:.0f}s, total {total:.0f}s of 300s; " + "; ".join(notes))


@_timed(9, "dag unfolding")
def criterion_9(seed=None) -> Outcome:
    dag = diamond()
    forest = unfold_dag(dag, 2)
    tree = check_forest_height(forest, 2)
    n_leaves = language_cardinality(leaves(forest))
    dag_roots = roots_automaton(dag)
    forest_roots = roots_automaton(forest)
    names = ["r", "u", "v", "w"]
    roots_match = all(member(dag_roots, LassoWord.finite(a))
                      == member(forest_roots, root_path(LassoWord.finite(a), 2)) for a in names)
    one_root = language_cardinality(forest_roots) == Finite(1)
    ok = tree and n_leaves == Finite(2) and roots_match and one_root
    return Outcome(0, "", ok, f"tree={tree} leaves={n_leaves!r} roots match={roots_match}")


@_timed(10, "powers")
def criterion_10(seed=None) -> Outcome:
    single = star(0)
    c_cont = language_cardinality(power_continuum(single).domain)
    c_count = language_cardinality(power_aleph0(single).domain)
    base = star(2)
    same = True
    for power, index in ((power_aleph0(base), LassoWord.finite(["$"] * 3)),
                         (power_continuum(base), LassoWord.of(["$1"], ["$2", "$1"]))):
        sliced = strip_copy(copy_slice(power, index))
        for a, b in ((sliced.domain, base.domain), (base.domain, sliced.domain),
                     (sliced.relation("E"), base.relation("E")),
                     (base.relation("E"), sliced.relation("E"))):
            if not _included(a, b):
                same = False
    ok = c_cont == CONTINUUM and c_count == ALEPH0 and same
    return Outcome(0, "", ok, f"continuum power {c_cont!r}, countable power {c_count!r}, "
                              f"slices equal the base: {same}")


def _included(a: BuchiAutomaton, b: BuchiAutomaton) -> bool:
    from .automata import emptiness
    return emptiness(difference(a, b))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


def run(numbers=None, seed=None, report=print) -> list[Outcome]:
    out = []
    for i, fn in enumerate(CRITERIA, 1):
        if numbers and i not in numbers:
            continue
        res = fn(seed)
        report(res.line())
        out.append(res)
    return out
