"""Recursive descent parser from tokens to :mod:`streamlang.syntax` trees.

Grammar (application binds tightest; a call needs its ``(`` glued to the
callee)::

    block   := stmt*
    stmt    := IDENT "=" expr
             | "def" IDENT ["(" params ")"] "=" block "end"
             | expr
    expr    := primary ("(" args ")")*
    primary := INT | FLOAT | STRING | "true" | "false" | IDENT
             | FORMAT ["(" fmtargs ")"] | "[" exprs "]" | "(" expr ")"
             | "fun" "(" params ")" "->" expr
    param   := IDENT | "~" IDENT | "~" LABEL expr | LABEL expr
"""

from __future__ import annotations

from . import syntax as ast
from .errors import ParseError
from .lexer import FLOAT, FORMAT, IDENT, INT, KEYWORD, LABEL, PUNCT, STRING, Pos, Token, tokenize


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else None

    def eof_pos(self) -> Pos:
        if not self.tokens:
            return Pos(1, 1)
        last = self.tokens[-1]
        return Pos(last.pos.line, last.pos.column + len(last.print()))

    def error(self, expected, tok=None):
        tok = tok if tok is not None else self.peek()
        pos = tok.pos if tok else self.eof_pos()
        found = repr(tok.text) if tok else "end of input"
        exp = sorted(expected)
        raise ParseError(f"unexpected {found}, expected {' or '.join(exp)}", pos, exp)

    def is_punct(self, text: str, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.kind == PUNCT and tok.text == text

    def is_keyword(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind == KEYWORD and tok.text == text

    def expect_punct(self, text: str) -> Token:
        if not self.is_punct(text):
            self.error({repr(text)})
        return self.next()

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    # blocks

    def block(self, terminators: set) -> ast.Expr:
        stmts = []
        while True:
            tok = self.peek()
            if tok is None:
                if None in terminators:
                    break
                self.error({"'end'"})
            if tok.kind == KEYWORD and tok.text in terminators:
                break
            stmts.append(self.stmt())
        result = None
        for kind, *data in reversed(stmts):
            if kind == "def":
                name, bound, pos = data
                rest = result if result is not None else ast.Unit(pos=pos)
                result = ast.Def(name, bound, rest, pos=pos)
            elif result is None:
                result = data[0]
            else:
                result = ast.Seq(data[0], result, pos=data[0].pos)
        if result is None:
            result = ast.Unit(pos=self.peek().pos if self.peek() else self.eof_pos())
        return result

    def stmt(self):
        tok = self.peek()
        if tok.kind == IDENT and self.is_punct("=", 1):
            self.i += 2
            return ("def", tok.text, self.expr(), tok.pos)
        if tok.kind == KEYWORD and tok.text == "def":
            self.next()
            name = self.peek()
            if name is None or name.kind != IDENT:
                self.error({"identifier"})
            self.next()
            params = None
            if self.is_punct("("):
                self.next()
                params = self.params()
                self.expect_punct(")")
            self.expect_punct("=")
            body = self.block({"end"})
            self.next()
            bound = body if params is None else ast.Fun(tuple(params), body, pos=name.pos)
            return ("def", name.text, bound, tok.pos)
        return ("expr", self.expr())

    # expressions

    def expr(self) -> ast.Expr:
        e = self.primary()
        while self.is_punct("(") and self.peek().adjacent:
            open_tok = self.next()
            args = self.args()
            self.expect_punct(")")
            labels = [a.label for a in args if a.label]
            if len(labels) != len(set(labels)):
                dup = next(l for l in labels if labels.count(l) > 1)
                raise ParseError(f"label {dup!r} given twice", open_tok.pos, {"distinct labels"})
            e = ast.Apply(e, tuple(args), pos=e.pos)
        return e

    def args(self) -> list:
        out = []
        if self.is_punct(")"):
            return out
        while True:
            tok = self.peek()
            if tok is not None and tok.kind == LABEL:
                self.next()
                out.append(ast.Arg(tok.text, self.expr()))
            else:
                out.append(ast.Arg(None, self.expr()))
            if not self.is_punct(","):
                return out
            self.next()

    def params(self) -> list:
        out = []
        if self.is_punct(")"):
            return out
        while True:
            labeled = False
            if self.is_punct("~"):
                self.next()
                labeled = True
            tok = self.peek()
            if tok is not None and tok.kind == LABEL:
                self.next()
                out.append(ast.Param(tok.text, True, self.expr()))
            elif tok is not None and tok.kind == IDENT:
                self.next()
                out.append(ast.Param(tok.text, labeled))
            else:
                self.error({"parameter"})
            if not self.is_punct(","):
                break
            self.next()
        names = [p.name for p in out]
        if len(names) != len(set(names)):
            self.error({"distinct parameter names"})
        return out

    def primary(self) -> ast.Expr:
        tok = self.peek()
        if tok is None:
            self.error({"expression"})
        k, t = tok.kind, tok.text
        if k == INT:
            self.next()
            return ast.LitInt(tok.value, pos=tok.pos)
        if k == FLOAT:
            self.next()
            return ast.LitFloat(tok.value, pos=tok.pos)
        if k == STRING:
            self.next()
            return ast.LitString(tok.value, pos=tok.pos)
        if k == IDENT:
            self.next()
            return ast.Var(t, pos=tok.pos)
        if k == KEYWORD and t in ("true", "false"):
            self.next()
            return ast.LitBool(t == "true", pos=tok.pos)
        if k == FORMAT:
            self.next()
            args = []
            if self.is_punct("(") and self.peek().adjacent:
                self.next()
                args = self.format_args()
                self.expect_punct(")")
            return ast.Format(tok.value, tuple(args), pos=tok.pos)
        if k == PUNCT and t == "[":
            self.next()
            items = []
            if not self.is_punct("]"):
                while True:
                    items.append(self.expr())
                    if not self.is_punct(","):
                        break
                    self.next()
            self.expect_punct("]")
            return ast.List(tuple(items), pos=tok.pos)
        if k == PUNCT and t == "(":
            self.next()
            e = self.expr()
            self.expect_punct(")")
            return e
        if k == KEYWORD and t == "fun":
            self.next()
            self.expect_punct("(")
            params = self.params()
            self.expect_punct(")")
            self.expect_punct("->")
            body = self.expr()
            return ast.Fun(tuple(params), body, pos=tok.pos)
        self.error({"expression"})

    def format_args(self) -> list:
        out = []
        if self.is_punct(")"):
            return out
        while True:
            tok = self.peek()
            label = None
            if tok is not None and tok.kind == LABEL:
                label = tok.text
                self.next()
                tok = self.peek()
            if tok is None or tok.kind not in (INT, IDENT):
                self.error({"integer", "identifier"})
            self.next()
            out.append((label, tok.value))
            if not self.is_punct(","):
                return out
            self.next()


def parse(tokens: list[Token]) -> ast.Expr:
    p = _Parser(tokens)
    e = p.block({None})
    return e


def parse_text(text: str) -> ast.Expr:
    return parse(tokenize(text))
