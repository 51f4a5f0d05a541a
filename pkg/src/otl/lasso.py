"""Ultimately periodic omega-words ``u v^omega`` and convolution.

A symbol of a k-track word is a tuple of k atoms.  Finite words are
represented by their padded extension ``u PAD^omega`` so the rest of the
library never handles finite words.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Hashable, Iterable, Sequence

PAD = "⋄"

Symbol = tuple


def _primitive_root(word: tuple) -> tuple:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def _canonical(prefix: tuple, period: tuple) -> tuple[tuple, tuple]:
    period = _primitive_root(period)
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = period[-1:] + period[:-1]
    return prefix, period


@dataclass(frozen=True)
class LassoWord:
    """The omega-word ``prefix . period^omega`` in canonical form.

    Construction always canonicalises: the period is made primitive and the
    prefix is shortened as far as a rotation of the period allows, so two
    instances are equal exactly when they denote the same omega-word.
    """

    prefix: tuple
    period: tuple

    def __init__(self, prefix: Iterable[Symbol], period: Iterable[Symbol]):
        prefix = tuple(tuple(s) for s in prefix)
        period = tuple(tuple(s) for s in period)
        if not period:
            raise ValueError("lasso period must be nonempty")
        arities = {len(s) for s in prefix + period}
        if len(arities) > 1:
            raise ValueError(f"mixed track counts in lasso: {sorted(arities)}")
        prefix, period = _canonical(prefix, period)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    @classmethod
    def finite(cls, word: Iterable[Hashable], tracks: int = 1) -> "LassoWord":
        """Single-track ``u PAD^omega`` (atoms given bare, not as tuples)."""
        if tracks != 1:
            raise ValueError("finite() builds single-track words; use convolve")
        return cls([(a,) for a in word], [(PAD,)])

    @classmethod
    def of(cls, prefix: Iterable[Hashable], period: Iterable[Hashable]) -> "LassoWord":
        """Single-track lasso from bare atoms."""
        return cls([(a,) for a in prefix], [(a,) for a in period])

    @property
    def tracks(self) -> int:
        return len(self.period[0])

    def __len__(self) -> int:
        return len(self.prefix) + len(self.period)

    def __getitem__(self, i: int) -> Symbol:
        """Symbol at 0-based position ``i``."""
        if i < len(self.prefix):
            return self.prefix[i]
        return self.period[(i - len(self.prefix)) % len(self.period)]

    def positions(self) -> int:
        """Number of states of the lasso shape graph."""
        return len(self.prefix) + len(self.period)

    def next_position(self, pos: int) -> int:
        pos += 1
        if pos == len(self.prefix) + len(self.period):
            return len(self.prefix)
        return pos

    def take(self, n: int) -> tuple:
        return tuple(self[i] for i in range(n))

    def track(self, i: int) -> "LassoWord":
        return LassoWord([(s[i],) for s in self.prefix], [(s[i],) for s in self.period])

    def drop_track(self, i: int) -> "LassoWord":
        return LassoWord([s[:i] + s[i + 1:] for s in self.prefix],
                         [s[:i] + s[i + 1:] for s in self.period])

    def pack(self) -> "LassoWord":
        """View a k-track word as a 1-track word over tuple atoms."""
        return LassoWord([(s,) for s in self.prefix], [(s,) for s in self.period])

    def unpack(self) -> "LassoWord":
        return LassoWord([s[0] for s in self.prefix], [s[0] for s in self.period])

    def __str__(self) -> str:
        return format_lasso(self)


def convolve(words: Sequence[LassoWord]) -> LassoWord:
    """Synchronised tupling ``w1 (x) w2 (x) ... (x) wn`` of lasso words."""
    if not words:
        raise ValueError("convolve needs at least one word")
    start = max(len(w.prefix) for w in words)
    period = lcm(*(len(w.period) for w in words))
    prefix = [sum((w[i] for w in words), ()) for i in range(start)]
    cycle = [sum((w[i] for w in words), ()) for i in range(start, start + period)]
    return LassoWord(prefix, cycle)


def parse_lasso(text: str) -> LassoWord:
    """Parse ``"a,a a,a|⋄,a"``: symbols split by spaces, tracks by commas."""
    if "|" not in text:
        raise ValueError(f"lasso literal needs '|': {text!r}")
    pre, per = text.split("|", 1)

    def symbols(part: str) -> list[tuple]:
        return [tuple(tok.split(",")) for tok in part.split()]

    return LassoWord(symbols(pre), symbols(per))


def format_lasso(w: LassoWord) -> str:
    def fmt(sym: tuple) -> str:
        return ",".join(str(a) for a in sym)

    return " ".join(map(fmt, w.prefix)) + "|" + " ".join(map(fmt, w.period))


def all_lassos(symbols: Sequence[Symbol], max_prefix: int, max_period: int):
    """Every canonical lasso over ``symbols`` within the size bounds."""
    from itertools import product

    seen = set()
    for plen in range(max_prefix + 1):
        for qlen in range(1, max_period + 1):
            for pre in product(symbols, repeat=plen):
                for per in product(symbols, repeat=qlen):
                    w = LassoWord(pre, per)
                    if w not in seen:
                        seen.add(w)
                        yield w
