"""Tokenizer for the scripting language."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import LexError

KEYWORDS = frozenset({"def", "end", "fun", "true", "false"})

IDENT = "ident"
INT = "int"
FLOAT = "float"
STRING = "string"
FORMAT = "format"
PUNCT = "punct"
KEYWORD = "keyword"
LABEL = "label"


@dataclass(frozen=True, order=True)
class Pos:
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: Pos
    # True when no whitespace separates this token from the previous one;
    # application requires the opening parenthesis to be adjacent.
    adjacent: bool = field(default=False, compare=False)

    @property
    def value(self):
        if self.kind == INT:
            return int(self.text)
        if self.kind == FLOAT:
            return float(self.text)
        if self.kind == STRING:
            return unescape(self.text)
        if self.kind == FORMAT:
            return self.text[1:]
        return self.text

    def print(self) -> str:
        return self.text + "=" if self.kind == LABEL else self.text


_NUMBER = re.compile(r"-?\d+(\.\d*)?([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*")
_PUNCT = ("->", "(", ")", "[", "]", ",", "=", "~")


def unescape(text: str) -> str:
    body = text[1:-1]
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\" and i + 1 < len(body):
            out.append(body[i + 1])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def escape(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    brackets: list[str] = []
    i = 0
    line, col = 1, 1
    n = len(text)
    adjacent = False

    def advance(k: int) -> None:
        nonlocal i, line, col
        for ch in text[i:i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        c = text[i]
        if c in " \t\r\n":
            advance(1)
            adjacent = False
            continue
        if c == "#":
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
            adjacent = False
            continue
        start = Pos(line, col)
        if c == '"':
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    if j + 1 < n and text[j + 1] in '"\\':
                        j += 2
                        continue
                    raise LexError(f"unsupported escape sequence in string", start)
                if text[j] == "\n":
                    break
                j += 1
            if j >= n or text[j] != '"':
                raise LexError("unterminated string literal", start)
            tokens.append(Token(STRING, text[i:j + 1], start, adjacent))
            advance(j + 1 - i)
        elif c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
            m = _NUMBER.match(text, i)
            word = m.group(0)
            kind = FLOAT if (m.group(1) or m.group(2)) else INT
            tokens.append(Token(kind, word, start, adjacent))
            advance(len(word))
        elif c == "%":
            m = _NAME.match(text, i + 1)
            if not m:
                raise LexError("expected a format name after '%'", start)
            tokens.append(Token(FORMAT, "%" + m.group(0), start, adjacent))
            advance(1 + len(m.group(0)))
        elif c.isalpha() or c == "_":
            m = _NAME.match(text, i)
            word = m.group(0)
            j = i + len(word)
            k = j
            while k < n and text[k] in " \t":
                k += 1
            is_label = (
                word not in KEYWORDS
                and brackets and brackets[-1] == "("
                and k < n and text[k] == "="
            )
            if is_label:
                tokens.append(Token(LABEL, word, start, adjacent))
                advance(k + 1 - i)
            else:
                kind = KEYWORD if word in KEYWORDS else IDENT
                tokens.append(Token(kind, word, start, adjacent))
                advance(len(word))
        else:
            for p in _PUNCT:
                if text.startswith(p, i):
                    break
            else:
                raise LexError(f"illegal character {c!r}", start)
            if p in "([":
                brackets.append(p)
            elif p in ")]" and brackets:
                brackets.pop()
            tokens.append(Token(PUNCT, p, start, adjacent))
            advance(len(p))
        adjacent = True
    return tokens


def print_tokens(tokens: list[Token]) -> str:
    parts = []
    for k, tok in enumerate(tokens):
        if k and not tok.adjacent:
            parts.append(" ")
        parts.append(tok.print())
    return "".join(parts)
