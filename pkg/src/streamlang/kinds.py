"""Arities and content kinds.

An arity is ``0``, ``S(a)``, the wildcard ``*`` or a variable.  A content
kind is an (audio, video, midi) triple of arities.  ``arity_subtype(a, b)``
reads "a is allowed by b".
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

MAX_DEPTH = 16


@dataclass(frozen=True)
class Zero:
    def __repr__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Succ:
    pred: "Arity"

    def __repr__(self) -> str:
        return f"S({self.pred!r})"


@dataclass(frozen=True)
class Star:
    def __repr__(self) -> str:
        return "*"


@dataclass(frozen=True)
class AVar:
    id: int
    fixed: bool = False

    def __repr__(self) -> str:
        return f"{'#' if self.fixed else '*'}{self.id}"


Arity = Union[Zero, Succ, Star, AVar]

ZERO = Zero()
STAR = Star()


def nat(n: int, base: Arity = ZERO) -> Arity:
    a = base
    for _ in range(n):
        a = Succ(a)
    return a


def split(a: Arity) -> tuple[int, Arity]:
    """Peel successors: returns (depth, innermost non-successor term)."""
    n = 0
    while isinstance(a, Succ):
        a = a.pred
        n += 1
    return n, a


def is_ground(a: Arity) -> bool:
    return not isinstance(split(a)[1], AVar)


def is_fixed(a: Arity) -> bool:
    return isinstance(split(a)[1], Zero)


def to_int(a: Arity) -> int:
    n, base = split(a)
    if not isinstance(base, Zero):
        raise ValueError(f"arity {a!r} is not a natural number")
    return n


def arity_subtype(left: Arity, right: Arity) -> bool:
    """Structural check of ``left <: right`` on ground arities."""
    while True:
        if isinstance(left, Zero):
            return isinstance(right, (Zero, Star))
        if isinstance(left, Star):
            return isinstance(right, Star)
        if isinstance(left, Succ):
            if isinstance(right, Succ):
                left, right = left.pred, right.pred
                continue
            if isinstance(right, Star):
                # S(A) <: * needs A <: *, which holds for every ground A
                left = left.pred
                continue
            return False
        raise ValueError(f"arity_subtype needs ground arities, got {left!r}")


@dataclass(frozen=True)
class ContentKind:
    audio: Arity
    video: Arity
    midi: Arity

    def components(self) -> tuple[Arity, Arity, Arity]:
        return (self.audio, self.video, self.midi)

    def is_fixed(self) -> bool:
        return all(is_fixed(a) for a in self.components())

    def counts(self) -> tuple[int, int, int]:
        return tuple(to_int(a) for a in self.components())

    def __repr__(self) -> str:
        return "(" + ",".join(render_arity(a) for a in self.components()) + ")"


def kind_of(audio: int, video: int = 0, midi: int = 0) -> ContentKind:
    return ContentKind(nat(audio), nat(video), nat(midi))


def kind_subtype(left: ContentKind, right: ContentKind) -> bool:
    return all(arity_subtype(l, r) for l, r in zip(left.components(), right.components()))


def render_arity(a: Arity, name=None) -> str:
    """Surface notation: numbers, ``*``, ``'*a``, ``'#a`` and ``'*a+n``."""
    n, base = split(a)
    if isinstance(base, Zero):
        return str(n)
    if isinstance(base, Star):
        head = "*"
    else:
        label = name(base) if name else str(base.id)
        head = f"'{'#' if base.fixed else '*'}{label}"
    return head if n == 0 else f"{head}+{n}"


def ground_arities(max_depth: int):
    """All ground arities with at most ``max_depth`` successors."""
    for n in range(max_depth + 1):
        yield nat(n)
        yield nat(n, STAR)


def all_ground_kinds(max_depth: int):
    arities = list(ground_arities(max_depth))
    for a, v, m in itertools.product(arities, repeat=3):
        yield ContentKind(a, v, m)
