"""Types, type schemes and unification.

Type variables (``'a``) range over types; arity variables (``'*a``, or
``'#a`` when restricted to fixed arities) range over arities and only
occur inside the kind of a ``source`` or ``format`` type.
"""

from __future__ import annotations

import itertools
import re
import string
from dataclasses import dataclass, field
from typing import Optional, Union

from . import kinds as K
from .errors import ConstraintViolation, OccursCheck, TypeMismatch
from .kinds import AVar, Arity, ContentKind, Star, Succ, Zero


@dataclass(frozen=True)
class TCon:
    name: str  # unit, bool, int, float, string


@dataclass(frozen=True)
class TList:
    elem: "Type"


@dataclass(frozen=True)
class TPair:
    left: "Type"
    right: "Type"


@dataclass(frozen=True)
class TSource:
    kind: ContentKind


@dataclass(frozen=True)
class TFormat:
    kind: ContentKind


@dataclass(frozen=True)
class TParam:
    label: Optional[str]
    optional: bool
    type: "Type"


@dataclass(frozen=True)
class TArrow:
    params: tuple  # of TParam
    result: "Type"


@dataclass(frozen=True)
class TVar:
    id: int


Type = Union[TCon, TList, TPair, TSource, TFormat, TArrow, TVar]

UNIT = TCon("unit")
BOOL = TCon("bool")
INT = TCon("int")
FLOAT = TCon("float")
STRING = TCon("string")
HANDLER = TArrow((TParam(None, False, TList(TPair(STRING, STRING))),), UNIT)


@dataclass(frozen=True)
class Scheme:
    quantified: tuple  # of TVar | AVar
    body: Type

    def render(self, **kw) -> str:
        return render(self.body, **kw)


class _Fail(Exception):
    """Internal unification failure, turned into a positioned error by callers."""

    def __init__(self, error_type, message):
        super().__init__(message)
        self.error_type = error_type
        self.message = message


class Subst:
    """A mutable substitution with a fresh-variable supply."""

    def __init__(self, start: int = 0):
        self.types: dict[int, Type] = {}
        self.arities: dict[int, Arity] = {}
        self._ids = itertools.count(start)

    def fresh(self) -> TVar:
        return TVar(next(self._ids))

    def fresh_arity(self, fixed: bool = False) -> AVar:
        return AVar(next(self._ids), fixed)

    def fresh_kind(self) -> ContentKind:
        return ContentKind(self.fresh_arity(), self.fresh_arity(), self.fresh_arity())

    # resolution

    def arity(self, a: Arity) -> Arity:
        """Resolve an arity fully."""
        n, base = K.split(a)
        while isinstance(base, AVar) and base.id in self.arities:
            m, base = K.split(self.arities[base.id])
            n += m
        return K.nat(n, base)

    def kind(self, k: ContentKind) -> ContentKind:
        return ContentKind(self.arity(k.audio), self.arity(k.video), self.arity(k.midi))

    def shallow(self, t: Type) -> Type:
        while isinstance(t, TVar) and t.id in self.types:
            t = self.types[t.id]
        return t

    def resolve(self, t: Type) -> Type:
        t = self.shallow(t)
        if isinstance(t, TList):
            return TList(self.resolve(t.elem))
        if isinstance(t, TPair):
            return TPair(self.resolve(t.left), self.resolve(t.right))
        if isinstance(t, TSource):
            return TSource(self.kind(t.kind))
        if isinstance(t, TFormat):
            return TFormat(self.kind(t.kind))
        if isinstance(t, TArrow):
            return TArrow(
                tuple(TParam(p.label, p.optional, self.resolve(p.type)) for p in t.params),
                self.resolve(t.result),
            )
        return t

    # unification

    def unify(self, expected: Type, actual: Type, subsume: bool = False) -> None:
        """Make ``expected`` and ``actual`` equal.

        With ``subsume``, a ground arity on the actual side is accepted
        wherever it is a subtype of the ground arity on the expected side.
        """
        a = self.shallow(expected)
        b = self.shallow(actual)
        if a == b:
            return
        if isinstance(a, TVar):
            self._bind_type(a, b)
        elif isinstance(b, TVar):
            self._bind_type(b, a)
        elif isinstance(a, TCon) and isinstance(b, TCon):
            if a.name != b.name:
                raise _Fail(TypeMismatch, f"{a.name} is not {b.name}")
        elif isinstance(a, TList) and isinstance(b, TList):
            self.unify(a.elem, b.elem, subsume)
        elif isinstance(a, TPair) and isinstance(b, TPair):
            self.unify(a.left, b.left, subsume)
            self.unify(a.right, b.right, subsume)
        elif isinstance(a, TSource) and isinstance(b, TSource) or isinstance(a, TFormat) and isinstance(b, TFormat):
            self.unify_kinds(a.kind, b.kind, subsume)
        elif isinstance(a, TArrow) and isinstance(b, TArrow):
            if len(a.params) != len(b.params):
                raise _Fail(TypeMismatch, "functions differ in their number of parameters")
            for p, q in zip(a.params, b.params):
                if p.label != q.label or p.optional != q.optional:
                    raise _Fail(TypeMismatch, "function parameters differ")
                self.unify(p.type, q.type)
            self.unify(a.result, b.result)
        else:
            raise _Fail(TypeMismatch, "incompatible types")

    def unify_kinds(self, expected: ContentKind, actual: ContentKind, subsume: bool = False) -> None:
        for x, y in zip(expected.components(), actual.components()):
            self.unify_arity(x, y, subsume)

    def unify_arity(self, expected: Arity, actual: Arity, subsume: bool = False) -> None:
        a = self.arity(expected)
        b = self.arity(actual)
        while True:
            if a == b:
                return
            if subsume and K.is_ground(a) and K.is_ground(b):
                if K.arity_subtype(b, a):
                    return
                raise _Fail(TypeMismatch, f"arity {K.render_arity(b)} is not allowed by {K.render_arity(a)}")
            if isinstance(a, AVar):
                return self._bind_arity(a, b)
            if isinstance(b, AVar):
                return self._bind_arity(b, a)
            if isinstance(a, Succ) and isinstance(b, Succ):
                a, b = a.pred, b.pred
                continue
            raise _Fail(TypeMismatch, f"arity {K.render_arity(b)} differs from {K.render_arity(a)}")

    def _bind_arity(self, v: AVar, a: Arity) -> None:
        n, base = K.split(a)
        if isinstance(base, AVar):
            if base.id == v.id:
                raise _Fail(OccursCheck, "arity variable occurs in its own instance")
            if v.fixed and not base.fixed:
                # the unconstrained variable takes over the constraint
                fixed = self.fresh_arity(fixed=True)
                self.arities[base.id] = fixed
                a = K.nat(n, fixed)
        elif isinstance(base, Star) and v.fixed:
            raise _Fail(ConstraintViolation, f"a fixed arity is required but {K.render_arity(a)} was found")
        if n > K.MAX_DEPTH:
            raise _Fail(TypeMismatch, f"arity exceeds the maximum depth {K.MAX_DEPTH}")
        assert not (v.fixed and isinstance(K.split(a)[1], Star))
        self.arities[v.id] = a

    def _bind_type(self, v: TVar, t: Type) -> None:
        if v.id in free_type_vars(self.resolve(t)):
            raise _Fail(OccursCheck, "type variable occurs in its own instance")
        self.types[v.id] = t

    # schemes

    def instantiate(self, scheme: Scheme) -> Type:
        if not scheme.quantified:
            return scheme.body
        mapping = {}
        for q in scheme.quantified:
            mapping[q] = self.fresh_arity(q.fixed) if isinstance(q, AVar) else self.fresh()
        return substitute(scheme.body, mapping)

    def generalize(self, t: Type, env_vars: set) -> Scheme:
        t = self.resolve(t)
        qs = [v for v in dict.fromkeys(free_vars(t)) if v.id not in env_vars]
        return Scheme(tuple(qs), t)


def _kind_map(k: ContentKind, f) -> ContentKind:
    return ContentKind(*(f(a) for a in k.components()))


def substitute(t: Type, mapping: dict) -> Type:
    def arity(a):
        n, base = K.split(a)
        return K.nat(n, mapping.get(base, base)) if isinstance(base, AVar) else a

    if isinstance(t, TVar):
        return mapping.get(t, t)
    if isinstance(t, TList):
        return TList(substitute(t.elem, mapping))
    if isinstance(t, TPair):
        return TPair(substitute(t.left, mapping), substitute(t.right, mapping))
    if isinstance(t, TSource):
        return TSource(_kind_map(t.kind, arity))
    if isinstance(t, TFormat):
        return TFormat(_kind_map(t.kind, arity))
    if isinstance(t, TArrow):
        return TArrow(
            tuple(TParam(p.label, p.optional, substitute(p.type, mapping)) for p in t.params),
            substitute(t.result, mapping),
        )
    return t


def free_vars(t: Type):
    """Type and arity variables of a resolved type, in order of appearance."""
    if isinstance(t, TVar):
        yield t
    elif isinstance(t, TList):
        yield from free_vars(t.elem)
    elif isinstance(t, TPair):
        yield from free_vars(t.left)
        yield from free_vars(t.right)
    elif isinstance(t, (TSource, TFormat)):
        for a in t.kind.components():
            base = K.split(a)[1]
            if isinstance(base, AVar):
                yield base
    elif isinstance(t, TArrow):
        for p in t.params:
            yield from free_vars(p.type)
        yield from free_vars(t.result)


def free_type_vars(t: Type) -> set:
    return {v.id for v in free_vars(t) if isinstance(v, TVar)}


# rendering


def _letters():
    for n in itertools.count(1):
        for combo in itertools.product(string.ascii_lowercase, repeat=n):
            yield "".join(combo)


class Namer:
    def __init__(self):
        self.names: dict = {}
        self._supply = _letters()

    def __call__(self, v) -> str:
        if v not in self.names:
            self.names[v] = next(self._supply)
        return self.names[v]


def render_kind(k: ContentKind, namer: Namer) -> str:
    return "(" + ",".join(K.render_arity(a, namer) for a in k.components()) + ")"


def render(t: Type, namer: Namer | None = None, optional: bool = True, handler: bool = True) -> str:
    """Surface notation for a resolved type.

    ``optional=False`` omits optional parameters, as in the short signatures
    of operator documentation.
    """
    namer = namer or Namer()

    def go(t, top=False):
        if isinstance(t, TCon):
            return t.name
        if isinstance(t, TVar):
            return "'" + namer(t)
        if isinstance(t, TList):
            return "[" + go(t.elem) + "]"
        if isinstance(t, TPair):
            left = go(t.left)
            if isinstance(t.left, (TPair, TArrow)):
                left = f"({left})"
            right = go(t.right)
            if isinstance(t.right, TArrow):
                right = f"({right})"
            return f"{left}*{right}"
        if isinstance(t, TSource):
            return "source" + render_kind(t.kind, namer)
        if isinstance(t, TFormat):
            return "format" + render_kind(t.kind, namer)
        if isinstance(t, TArrow):
            if handler and t == HANDLER:
                return "handler"
            parts = []
            for p in t.params:
                if p.optional and not optional:
                    continue
                text = go(p.type)
                if p.label:
                    text = ("?" if p.optional else "") + f"{p.label}:{text}"
                parts.append(text)
            return "(" + ",".join(parts) + ") -> " + go(t.result)
        raise TypeError(f"not a type: {t!r}")

    return go(t, True)


# parsing of type expressions, used to write the builtin catalog


_TYPE_TOKEN = re.compile(r"\s*(->|'[*#]?[a-z]+|[A-Za-z_][A-Za-z0-9_.]*|\d+|[()\[\],*+?:])")


def parse_type(text: str, subst: Subst, names: dict | None = None) -> Type:
    """Parse the surface notation back into a type, allocating variables in ``subst``."""
    names = {} if names is None else names
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TYPE_TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad type syntax at {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
    toks.append(None)
    i = 0

    def peek():
        return toks[i]

    def take(expect=None):
        nonlocal i
        tok = toks[i]
        if expect is not None and tok != expect:
            raise ValueError(f"expected {expect!r} in type {text!r}, got {tok!r}")
        i += 1
        return tok

    def var(tok):
        if tok not in names:
            if tok.startswith("'*"):
                names[tok] = subst.fresh_arity(False)
            elif tok.startswith("'#"):
                names[tok] = subst.fresh_arity(True)
            else:
                names[tok] = subst.fresh()
        return names[tok]

    def arity():
        tok = take()
        if tok.isdigit():
            base = K.nat(int(tok))
        elif tok == "*":
            base = K.STAR
        elif tok.startswith("'"):
            base = var(tok)
        else:
            raise ValueError(f"bad arity {tok!r}")
        if peek() == "+":
            take()
            base = K.nat(int(take()), base)
        return base

    def kind():
        take("(")
        a = arity()
        take(",")
        v = arity()
        take(",")
        m = arity()
        take(")")
        return ContentKind(a, v, m)

    def atom():
        tok = peek()
        if tok == "(":
            # parameter list of an arrow, or a parenthesized type
            take("(")
            params = []
            if peek() != ")":
                while True:
                    params.append(param())
                    if peek() != ",":
                        break
                    take(",")
            take(")")
            if peek() == "->":
                take("->")
                return TArrow(tuple(params), pair())
            if len(params) == 1 and params[0].label is None:
                return params[0].type
            raise ValueError(f"parameter list without arrow in {text!r}")
        if tok == "[":
            take("[")
            t = pair()
            take("]")
            return TList(t)
        take()
        if tok.startswith("'"):
            return var(tok)
        if tok == "source":
            return TSource(kind())
        if tok == "format":
            return TFormat(kind())
        if tok == "handler":
            return HANDLER
        if tok in ("unit", "bool", "int", "float", "string"):
            return TCon(tok)
        raise ValueError(f"unknown type {tok!r} in {text!r}")

    def pair():
        t = atom()
        if peek() == "*":
            take("*")
            return TPair(t, pair())
        return t

    def param():
        optional = False
        if peek() == "?":
            take("?")
            optional = True
        if toks[i + 1] == ":" and toks[i] not in ("(", "["):
            label = take()
            take(":")
            return TParam(label, optional, pair())
        return TParam(None, optional, pair())

    t = pair()
    if peek() is not None:
        raise ValueError(f"trailing input in type {text!r}")
    return t


def scheme_of(text: str) -> Scheme:
    """A closed scheme generalizing every variable of a type expression."""
    # negative ids never collide with variables of an inference run
    s = Subst(start=-(10**9))
    t = parse_type(text, s)
    return Scheme(tuple(dict.fromkeys(free_vars(t))), t)
