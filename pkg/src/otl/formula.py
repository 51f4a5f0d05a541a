"""First-order formulas with cardinality quantifiers, and their s-expression syntax.

Surface syntax examples::

    (exists^aleph0 x (and (E r x) (exists^continuum y (E x y))))
    (forall x (implies (E x y) (not (= x y))))
    (exists^=3 x (E r x))

Quantifier heads: ``exists``, ``forall``, ``exists^aleph0``,
``exists^continuum``, ``exists^=n`` (exactly n), ``exists^>=n`` and
``exists^infinite``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .sections import ALEPH0_SECTION, CONTINUUM_SECTION, INFINITE, AtLeast, Exactly, Target


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Rel:
    name: str
    args: tuple


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    body: object


@dataclass(frozen=True)
class And:
    parts: tuple


@dataclass(frozen=True)
class Or:
    parts: tuple


@dataclass(frozen=True)
class Exists:
    var: str
    body: object


@dataclass(frozen=True)
class Forall:
    var: str
    body: object


@dataclass(frozen=True)
class ExistsCard:
    var: str
    target: Target
    body: object


@dataclass(frozen=True)
class Const:
    value: bool


TRUE = Const(True)
FALSE = Const(False)


def free_vars(f) -> list[str]:
    """Free variables in order of first occurrence."""
    out: dict = {}

    def walk(g, bound):
        if isinstance(g, Rel):
            for a in g.args:
                if a not in bound:
                    out.setdefault(a, None)
        elif isinstance(g, Eq):
            for a in (g.left, g.right):
                if a not in bound:
                    out.setdefault(a, None)
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, (And, Or)):
            for p in g.parts:
                walk(p, bound)
        elif isinstance(g, (Exists, Forall, ExistsCard)):
            walk(g.body, bound | {g.var})
        elif isinstance(g, Const):
            pass
        else:
            raise FormulaError(f"not a formula node: {g!r}")

    walk(f, frozenset())
    return list(out)


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(\(|\)|[^\s()]+)")


def _tokenize(text: str) -> list[str]:
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"unexpected character at {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return tokens


def _read(tokens: list[str], i: int):
    if i >= len(tokens):
        raise FormulaError("unexpected end of formula")
    tok = tokens[i]
    if tok == ")":
        raise FormulaError("unbalanced ')'")
    if tok != "(":
        return tok, i + 1
    items = []
    i += 1
    while True:
        if i >= len(tokens):
            raise FormulaError("missing ')'")
        if tokens[i] == ")":
            return items, i + 1
        item, i = _read(tokens, i)
        items.append(item)


def _quant_target(head: str) -> Target | None:
    if head == "exists^aleph0":
        return ALEPH0_SECTION
    if head == "exists^continuum":
        return CONTINUUM_SECTION
    if head == "exists^infinite":
        return INFINITE
    m = re.fullmatch(r"exists\^=(\d+)", head)
    if m:
        return Exactly(int(m.group(1)))
    m = re.fullmatch(r"exists\^>=(\d+)", head)
    if m:
        return AtLeast(int(m.group(1)))
    return None


def _build(sx):
    if isinstance(sx, str):
        if sx == "true":
            return TRUE
        if sx == "false":
            return FALSE
        raise FormulaError(f"bare symbol {sx!r} is not a formula")
    if not sx:
        raise FormulaError("empty expression")
    head, *rest = sx
    if not isinstance(head, str):
        raise FormulaError("expression head must be a symbol")
    if head == "not":
        if len(rest) != 1:
            raise FormulaError("not takes one argument")
        return Not(_build(rest[0]))
    if head in ("and", "or"):
        parts = tuple(_build(r) for r in rest)
        if not parts:
            return TRUE if head == "and" else FALSE
        if len(parts) == 1:
            return parts[0]
        return And(parts) if head == "and" else Or(parts)
    if head == "implies":
        if len(rest) != 2:
            raise FormulaError("implies takes two arguments")
        return Or((Not(_build(rest[0])), _build(rest[1])))
    if head == "iff":
        a, b = (_build(r) for r in rest)
        return And((Or((Not(a), b)), Or((Not(b), a))))
    if head in ("exists", "forall") or head.startswith("exists^"):
        if len(rest) != 2 or not isinstance(rest[0], str):
            raise FormulaError(f"{head} takes a variable and a body")
        var, body = rest[0], _build(rest[1])
        if head == "exists":
            return Exists(var, body)
        if head == "forall":
            return Forall(var, body)
        target = _quant_target(head)
        if target is None:
            raise FormulaError(f"unknown quantifier {head!r}")
        return ExistsCard(var, target, body)
    if head == "=":
        if len(rest) != 2 or not all(isinstance(r, str) for r in rest):
            raise FormulaError("= takes two variables")
        return Eq(rest[0], rest[1])
    if not all(isinstance(r, str) for r in rest):
        raise FormulaError(f"arguments of {head} must be variables")
    return Rel(head, tuple(rest))


def parse_formula(text: str):
    tokens = _tokenize(text)
    sx, i = _read(tokens, 0)
    if i != len(tokens):
        raise FormulaError("trailing input after formula")
    return _build(sx)


def format_formula(f) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Rel):
        return "(" + " ".join((f.name,) + f.args) + ")"
    if isinstance(f, Eq):
        return f"(= {f.left} {f.right})"
    if isinstance(f, Not):
        return f"(not {format_formula(f.body)})"
    if isinstance(f, (And, Or)):
        head = "and" if isinstance(f, And) else "or"
        return "(" + head + " " + " ".join(format_formula(p) for p in f.parts) + ")"
    if isinstance(f, Exists):
        return f"(exists {f.var} {format_formula(f.body)})"
    if isinstance(f, Forall):
        return f"(forall {f.var} {format_formula(f.body)})"
    if isinstance(f, ExistsCard):
        t = f.target
        head = {"aleph0": "exists^aleph0", "continuum": "exists^continuum",
                "infinite": "exists^infinite"}.get(t.kind)
        if head is None:
            head = f"exists^={t.n}" if t.kind == "exactly" else f"exists^>={t.n}"
        return f"({head} {f.var} {format_formula(f.body)})"
    raise FormulaError(f"not a formula node: {f!r}")
