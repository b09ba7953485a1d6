"""Abstract syntax of scripts, and a printer producing reparseable text."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .lexer import Pos, escape


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Var:
    name: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class LitInt:
    value: int
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class LitFloat:
    value: float
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class LitString:
    value: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class LitBool:
    value: bool
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Unit:
    """The empty program or an empty body."""

    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class List:
    items: tuple
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Arg:
    label: Optional[str]
    value: "Expr"


@dataclass(frozen=True)
class Apply:
    callee: "Expr"
    args: tuple  # of Arg, in source order
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Param:
    name: str
    labeled: bool = False
    default: Optional["Expr"] = None

    @property
    def optional(self) -> bool:
        return self.default is not None


@dataclass(frozen=True)
class Fun:
    params: tuple  # of Param
    body: "Expr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Def:
    name: str
    bound: "Expr"
    rest: "Expr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Seq:
    first: "Expr"
    rest: "Expr"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Format:
    name: str
    args: tuple  # of (label or None, int | str)
    pos: Optional[Pos] = _pos()


Expr = Union[Var, LitInt, LitFloat, LitString, LitBool, Unit, List, Apply, Fun, Def, Seq, Format]


def _float(v: float) -> str:
    text = repr(v)
    if "e" in text or "." in text or "inf" in text or "nan" in text:
        return text
    return text + "."


def _param(p: Param) -> str:
    if p.default is not None:
        return f"~{p.name}={unparse_expr(p.default)}"
    return f"~{p.name}" if p.labeled else p.name


def unparse_expr(e: Expr) -> str:
    if isinstance(e, Var):
        return e.name
    if isinstance(e, LitInt):
        return str(e.value)
    if isinstance(e, LitFloat):
        return _float(e.value)
    if isinstance(e, LitString):
        return escape(e.value)
    if isinstance(e, LitBool):
        return "true" if e.value else "false"
    if isinstance(e, Unit):
        return ""
    if isinstance(e, List):
        return "[" + ",".join(unparse_expr(x) for x in e.items) + "]"
    if isinstance(e, Apply):
        callee = unparse_expr(e.callee)
        if not isinstance(e.callee, (Var, Apply)):
            callee = f"({callee})"
        args = ",".join(
            (f"{a.label}={unparse_expr(a.value)}" if a.label else unparse_expr(a.value))
            for a in e.args
        )
        return f"{callee}({args})"
    if isinstance(e, Fun):
        body = unparse_expr(e.body)
        if isinstance(e.body, (Def, Seq)):
            # a block body only fits inside an anonymous def
            body = f"({body})"
        return "(fun (" + ",".join(_param(p) for p in e.params) + ") -> " + body + ")"
    if isinstance(e, Format):
        if not e.args:
            return "%" + e.name
        args = ",".join(f"{k}={v}" if k else str(v) for k, v in e.args)
        return f"%{e.name}({args})"
    if isinstance(e, (Def, Seq)):
        return "\n".join(_block(e))
    raise TypeError(f"not an expression: {e!r}")


def _block(e: Expr) -> list[str]:
    lines = []
    while True:
        if isinstance(e, Def):
            if isinstance(e.bound, Fun):
                params = ",".join(_param(p) for p in e.bound.params)
                body = "\n".join("  " + ln for ln in _block(e.bound.body))
                lines.append(f"def {e.name}({params}) =\n{body}\nend")
            elif isinstance(e.bound, (Def, Seq, Unit)):
                body = "\n".join("  " + ln for ln in _block(e.bound))
                lines.append(f"def {e.name} =\n{body}\nend")
            else:
                lines.append(f"{e.name} = {unparse_expr(e.bound)}")
            e = e.rest
        elif isinstance(e, Seq):
            lines.append(unparse_expr(e.first))
            e = e.rest
        else:
            if not isinstance(e, Unit):
                lines.append(unparse_expr(e))
            return lines


def unparse(e: Expr) -> str:
    return unparse_expr(e)
