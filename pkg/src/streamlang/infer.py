"""Type inference for scripts.

Polymorphism is ML-style with generalization at bindings of syntactic
values only.  At application sites an argument whose content kind is a
subtype of the declared one is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as ast
from .catalog import builtin_schemes, format_spec
from .errors import TypeMismatch, UnboundVariable
from .types import (
    BOOL, FLOAT, INT, STRING, UNIT, Namer, Scheme, Subst, TArrow, TFormat, TList, TParam, TVar,
    _Fail, free_vars, render,
)

MISSING = object()


class ArgumentError(Exception):
    pass


def match_args(params, args):
    """Assign call arguments to parameters.

    ``params`` is a sequence of (label, optional) pairs and ``args`` of
    (label, value) pairs.  Labeled arguments go to the parameter with that
    label; the others fill unlabeled parameters left to right.  Returns one
    entry per parameter, ``MISSING`` for omitted optional ones.
    """
    out = [MISSING] * len(params)
    positional = [i for i, (label, _) in enumerate(params) if label is None]
    nxt = 0
    for label, value in args:
        if label is not None:
            idx = next((i for i, (lb, _) in enumerate(params) if lb == label), None)
            if idx is None:
                raise ArgumentError(f"no parameter labeled {label!r}")
            out[idx] = value
        else:
            if nxt >= len(positional):
                raise ArgumentError("too many arguments")
            out[positional[nxt]] = value
            nxt += 1
    for i, (label, optional) in enumerate(params):
        if out[i] is MISSING and not optional:
            what = f"argument {label!r}" if label else "a positional argument"
            raise ArgumentError(f"missing {what}")
    return out


def is_syntactic_value(e: ast.Expr) -> bool:
    if isinstance(e, (ast.Fun, ast.LitInt, ast.LitFloat, ast.LitString, ast.LitBool, ast.Var, ast.Format, ast.Unit)):
        return True
    if isinstance(e, ast.List):
        return all(is_syntactic_value(x) for x in e.items)
    return False


@dataclass
class Inference:
    subst: Subst = field(default_factory=Subst)
    bindings: list = field(default_factory=list)  # top-level (name, type)

    def render(self, t) -> str:
        return render(self.subst.resolve(t))

    def render_bindings(self) -> list[str]:
        return [f"{name} : {self.render(t)}" for name, t in self.bindings]


class Checker:
    def __init__(self, subst: Subst | None = None):
        self.subst = subst or Subst()

    def error(self, fail: _Fail, expected, actual, pos):
        namer = Namer()
        exp = render(self.subst.resolve(expected), namer)
        act = render(self.subst.resolve(actual), namer)
        if fail.error_type is TypeMismatch:
            msg = f"this value has type {act} but it should be a subtype of {exp}"
            return TypeMismatch(msg, pos, expected=exp, actual=act)
        return fail.error_type(f"{fail.message}: {act} against {exp}", pos)

    def env_vars(self, env: dict) -> set:
        ids = set()
        for scheme in env.values():
            for v in free_vars(self.subst.resolve(scheme.body)):
                if v not in scheme.quantified:
                    ids.add(v.id)
        return ids

    def infer(self, e: ast.Expr, env: dict, top: list | None = None):
        s = self.subst
        if isinstance(e, ast.Var):
            scheme = env.get(e.name)
            if scheme is None:
                raise UnboundVariable(f"unbound variable {e.name}", e.pos)
            return s.instantiate(scheme)
        if isinstance(e, ast.LitInt):
            return INT
        if isinstance(e, ast.LitFloat):
            return FLOAT
        if isinstance(e, ast.LitString):
            return STRING
        if isinstance(e, ast.LitBool):
            return BOOL
        if isinstance(e, ast.Unit):
            return UNIT
        if isinstance(e, ast.Format):
            return TFormat(format_spec(e.name, e.args, e.pos).kind)
        if isinstance(e, ast.List):
            elem = s.fresh()
            for item in e.items:
                t = self.infer(item, env)
                try:
                    s.unify(elem, t)
                except _Fail as f:
                    raise self.error(f, elem, t, item.pos) from None
            return TList(elem)
        if isinstance(e, ast.Apply):
            return self.infer_apply(e, env)
        if isinstance(e, ast.Fun):
            params = []
            inner = dict(env)
            for p in e.params:
                t = s.fresh()
                if p.default is not None:
                    dt = self.infer(p.default, env)
                    s.unify(t, dt)
                label = p.name if (p.labeled or p.default is not None) else None
                params.append(TParam(label, p.default is not None, t))
                inner[p.name] = Scheme((), t)
            return TArrow(tuple(params), self.infer(e.body, inner))
        if isinstance(e, ast.Def):
            t = self.infer(e.bound, env)
            if is_syntactic_value(e.bound):
                scheme = s.generalize(t, self.env_vars(env))
            else:
                scheme = Scheme((), t)
            if top is not None:
                top.append((e.name, t))
            return self.infer(e.rest, {**env, e.name: scheme}, top)
        if isinstance(e, ast.Seq):
            self.infer(e.first, env)
            return self.infer(e.rest, env, top)
        raise TypeError(f"not an expression: {e!r}")

    def infer_apply(self, e: ast.Apply, env: dict):
        s = self.subst
        ft = s.shallow(self.infer(e.callee, env))
        if isinstance(ft, TVar):
            arrow = TArrow(tuple(TParam(a.label, False, s.fresh()) for a in e.args), s.fresh())
            s.unify(ft, arrow)
            ft = arrow
        if not isinstance(ft, TArrow):
            raise TypeMismatch(
                f"this value has type {self.render_one(ft)} and cannot be applied", e.pos,
                actual=self.render_one(ft),
            )
        try:
            matched = match_args(
                [(p.label, p.optional) for p in ft.params],
                [(a.label, a.value) for a in e.args],
            )
        except ArgumentError as err:
            raise TypeMismatch(f"{err} in call to a function of type {self.render_one(ft)}", e.pos) from None
        for p, arg in zip(ft.params, matched):
            if arg is MISSING:
                continue
            at = self.infer(arg, env)
            try:
                s.unify(p.type, at, subsume=True)
            except _Fail as f:
                raise self.error(f, p.type, at, arg.pos or e.pos) from None
        return ft.result

    def render_one(self, t) -> str:
        return render(self.subst.resolve(t))


def default_env() -> dict:
    return builtin_schemes()


def infer(expr: ast.Expr, env: dict | None = None, subst: Subst | None = None) -> Scheme:
    """Infer the scheme of a whole expression."""
    checker = Checker(subst)
    env = default_env() if env is None else env
    t = checker.infer(expr, env)
    if is_syntactic_value(expr):
        return checker.subst.generalize(t, checker.env_vars(env))
    return Scheme((), checker.subst.resolve(t))


def check_program(expr: ast.Expr, env: dict | None = None, subst: Subst | None = None) -> Inference:
    """Type-check a script, recording its top-level bindings."""
    checker = Checker(subst)
    env = default_env() if env is None else env
    result = Inference(checker.subst)
    checker.infer(expr, env, result.bindings)
    return result
