"""Text form of formulas.

Grammar (ASCII)::

    formula  := conj ('|' conj)*
    conj     := unary ('&' unary)*
    unary    := '!' unary | QUANT unary | primary
    primary  := '(' formula ')' | 'T' | 'F' | VAR ('~' | '=') VAR
    QUANT    := ('E' | 'A') VAR          e.g.  Ex  Ay2
    VAR      := [a-z][a-z0-9_]*

A quantifier scopes over the following unary expression, so ``Ex (x ~ y) & y ~ y``
is a conjunction whose second part is outside the quantifier.
"""

from __future__ import annotations

import re

from ..errors import FreeVariableError, ParseError
from .ast import (
    Adj,
    And,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Not,
    Or,
    Top,
    free_variables,
)

_TOKEN = re.compile(
    r"\s*(?:(?P<quant>[EA][a-z][a-z0-9_]*)|(?P<var>[a-z][a-z0-9_]*)|(?P<const>[TF])(?![A-Za-z0-9_])|(?P<op>[()&|!~=]))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        out.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, value):
        kind, text, pos = self.take()
        if kind != "op" or text != value:
            raise ParseError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def formula(self) -> Formula:
        parts = [self.conj()]
        while self.peek()[:2] == ("op", "|"):
            self.take()
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.unary()]
        while self.peek()[:2] == ("op", "&"):
            self.take()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        kind, text, pos = self.peek()
        if kind == "op" and text == "!":
            self.take()
            return Not(self.unary())
        if kind == "quant":
            self.take()
            node = Exists if text[0] == "E" else Forall
            return node(text[1:], self.unary())
        return self.primary()

    def primary(self) -> Formula:
        kind, text, pos = self.take()
        if kind == "op" and text == "(":
            inner = self.formula()
            self.expect_op(")")
            return inner
        if kind == "const":
            return Top() if text == "T" else Bottom()
        if kind == "var":
            okind, otext, opos = self.take()
            if okind != "op" or otext not in "~=":
                raise ParseError(f"expected '~' or '=' after {text!r}", opos)
            rkind, rtext, _ = self.take()
            if rkind != "var":
                raise ParseError(f"expected a variable after {otext!r}", opos)
            return Adj(text, rtext) if otext == "~" else Eq(text, rtext)
        raise ParseError(f"unexpected {text or 'end of input'!r}", pos)


def parse(text: str, sentence: bool = True) -> Formula:
    p = _Parser(text)
    f = p.formula()
    kind, tok, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {tok!r}", pos)
    if sentence:
        free = free_variables(f)
        if free:
            raise FreeVariableError(f"unbound variables: {', '.join(sorted(free))}")
    return f


def _wrap(f: Formula) -> str:
    s = to_text(f)
    return f"({s})" if isinstance(f, (And, Or, Adj, Eq)) else s


def to_text(f: Formula) -> str:
    if isinstance(f, Top):
        return "T"
    if isinstance(f, Bottom):
        return "F"
    if isinstance(f, Adj):
        return f"{f.a} ~ {f.b}"
    if isinstance(f, Eq):
        return f"{f.a} = {f.b}"
    if isinstance(f, Not):
        return "!" + _wrap(f.body)
    if isinstance(f, Exists):
        return f"E{f.var} " + _wrap(f.body)
    if isinstance(f, Forall):
        return f"A{f.var} " + _wrap(f.body)
    if isinstance(f, And):
        return " & ".join(f"({to_text(p)})" if isinstance(p, (And, Or)) else to_text(p) for p in f.parts)
    if isinstance(f, Or):
        return " | ".join(f"({to_text(p)})" if isinstance(p, (And, Or)) else to_text(p) for p in f.parts)
    raise TypeError(f"not a formula: {f!r}")
