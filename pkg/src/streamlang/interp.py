"""Call-by-value evaluation of type-checked scripts.

Applying a source constructor adds a node to the graph and returns it;
sources are ordinary values that can be bound, passed and put in lists.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import syntax as ast
from .builtins import MISSING_ARG, SCHEMES, construct
from .catalog import format_spec
from .errors import StreamlangError
from .graph import Graph
from .infer import MISSING, ArgumentError, match_args


@dataclass(frozen=True)
class Closure:
    params: tuple  # of ast.Param
    body: ast.Expr
    env: dict = field(compare=False, repr=False)

    def signature(self):
        return [
            (p.name if (p.labeled or p.default is not None) else None, p.default is not None)
            for p in self.params
        ]


@dataclass(frozen=True)
class Builtin:
    name: str

    def signature(self):
        return [(p.label, p.optional) for p in SCHEMES[self.name].body.params]


class Interpreter:
    def __init__(self, graph: Graph):
        self.graph = graph
        self.globals = {name: Builtin(name) for name in SCHEMES}

    def run(self, program: ast.Expr):
        return self.eval(program, dict(self.globals))

    def eval(self, e: ast.Expr, env: dict):
        if isinstance(e, ast.Var):
            return env[e.name]
        if isinstance(e, (ast.LitInt, ast.LitFloat, ast.LitString, ast.LitBool)):
            return e.value
        if isinstance(e, ast.Unit):
            return None
        if isinstance(e, ast.Format):
            return format_spec(e.name, e.args, e.pos)
        if isinstance(e, ast.List):
            return [self.eval(x, env) for x in e.items]
        if isinstance(e, ast.Fun):
            return Closure(e.params, e.body, env)
        if isinstance(e, ast.Def):
            value = self.eval(e.bound, env)
            return self.eval(e.rest, {**env, e.name: value})
        if isinstance(e, ast.Seq):
            self.eval(e.first, env)
            return self.eval(e.rest, env)
        if isinstance(e, ast.Apply):
            fn = self.eval(e.callee, env)
            args = [(a.label, self.eval(a.value, env)) for a in e.args]
            return self.call(fn, args, e.pos)
        raise TypeError(f"not an expression: {e!r}")

    def call(self, fn, args, pos=None):
        """Apply a closure or builtin to evaluated ``(label, value)`` arguments."""
        try:
            matched = match_args(fn.signature(), args)
        except ArgumentError as err:
            # unreachable for checked scripts
            raise StreamlangError(str(err), pos) from None
        if isinstance(fn, Closure):
            env = dict(fn.env)
            for p, v in zip(fn.params, matched):
                env[p.name] = self.eval(p.default, fn.env) if v is MISSING else v
            return self.eval(fn.body, env)
        values = [MISSING_ARG if v is MISSING else self.wrap(fn.name, i, v, pos) for i, v in enumerate(matched)]
        try:
            return construct(self.graph, fn.name, pos, values)
        except StreamlangError as err:
            if err.pos is None:
                err.pos = pos
            raise

    def wrap(self, name: str, index: int, value, pos):
        """Turn script functions passed to operators into Python callables."""
        if name == "on_metadata" and index == 0:
            return lambda pairs: self.call(value, [(None, pairs)], pos)
        if name == "fallback" and index == 1:
            return [self._transition(f, pos) for f in value]
        return value

    def _transition(self, f, pos):
        return lambda old, new: self.call(f, [(None, old), (None, new)], pos)


def evaluate(program: ast.Expr, graph: Graph):
    return Interpreter(graph).run(program)
