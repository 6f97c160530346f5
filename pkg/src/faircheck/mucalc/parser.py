"""Text syntax for formulae.

    f ::= ff | tt | X | !f | f || g | f && g | f => g | <R>f | [R]f
        | mu X. f | nu X. f | (f)
    R ::= eps | a | "a b" | {a,b} | !{a,b} | R . Q | R + Q | R* | (R)

Binders extend as far right as possible; ``=>`` is right associative and
binds weaker than ``||``, which binds weaker than ``&&``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from faircheck.lts import ActionSet
from faircheck.mucalc.syntax import (
    FF, TT, Acts, Alt, And, Box, Diamond, Eps, FormulaError, Implies, Mu, Not, Nu,
    Or, Seq, Star, Var, KEYWORDS,
)


class FormulaSyntaxError(FormulaError):
    def __init__(self, message, text=None, pos=None):
        self.pos = pos
        self.line = self.column = None
        if text is not None and pos is not None:
            self.line = text.count("\n", 0, pos) + 1
            self.column = pos - (text.rfind("\n", 0, pos) + 1) + 1
            message = f"line {self.line}, column {self.column}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    pos: int


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<op>=>|\|\||&&|[!<>\[\]{}(),.+*])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<string>"(?:[^"\\]|\\.)*")
""", re.VERBOSE)


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos] == '"':
                raise FormulaSyntaxError("unterminated quoted label", text, pos)
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", text, pos)
        kind = m.lastgroup
        if kind == "string":
            raw = m.group()[1:-1]
            tokens.append(Token("label", re.sub(r"\\(.)", r"\1", raw), pos))
        elif kind == "ident":
            tokens.append(Token("ident", m.group(), pos))
        elif kind == "op":
            tokens.append(Token(m.group(), m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.peek
        if tok.kind != kind:
            self.fail(f"expected {what or repr(kind)}, found {self.describe(tok)}")
        return self.advance()

    def describe(self, tok):
        return "end of input" if tok.kind == "eof" else repr(tok.value)

    def fail(self, message, tok=None):
        tok = tok or self.peek
        raise FormulaSyntaxError(message, self.text, tok.pos)

    # formulae

    def formula(self):
        if self.peek.kind == "ident" and self.peek.value in ("mu", "nu"):
            return self.binder()
        left = self.disjunction()
        if self.peek.kind == "=>":
            self.advance()
            return Implies(left, self.formula())
        return left

    def binder(self):
        kw = self.advance().value
        name = self.expect("ident", "a variable name")
        if name.value in KEYWORDS:
            self.fail(f"{name.value!r} cannot be used as a variable", name)
        self.expect(".", "'.' after the bound variable")
        body = self.formula()
        return (Mu if kw == "mu" else Nu)(name.value, body)

    def disjunction(self):
        left = self.conjunction()
        while self.peek.kind == "||":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self):
        left = self.unary()
        while self.peek.kind == "&&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok = self.peek
        if tok.kind == "!":
            self.advance()
            return Not(self.unary())
        if tok.kind == "<":
            self.advance()
            reg = self.regular()
            self.expect(">", "'>' closing the diamond")
            return Diamond(reg, self.unary())
        if tok.kind == "[":
            self.advance()
            reg = self.regular()
            self.expect("]", "']' closing the box")
            return Box(reg, self.unary())
        if tok.kind == "(":
            self.advance()
            inner = self.formula()
            self.expect(")", "')'")
            return inner
        if tok.kind == "ident":
            if tok.value in ("mu", "nu"):
                return self.binder()
            self.advance()
            if tok.value == "ff":
                return FF()
            if tok.value == "tt":
                return TT()
            if tok.value == "eps":
                self.fail("'eps' is not a state formula", tok)
            return Var(tok.value)
        self.fail(f"expected a formula, found {self.describe(tok)}")

    # regular formulae

    def regular(self):
        left = self.concatenation()
        while self.peek.kind == "+":
            self.advance()
            left = Alt(left, self.concatenation())
        return left

    def concatenation(self):
        left = self.postfix()
        while self.peek.kind == ".":
            self.advance()
            left = Seq(left, self.postfix())
        return left

    def postfix(self):
        r = self.regular_atom()
        while self.peek.kind == "*":
            self.advance()
            r = Star(r)
        return r

    def regular_atom(self):
        tok = self.peek
        if tok.kind == "ident" and tok.value == "eps":
            self.advance()
            return Eps()
        if tok.kind in ("ident", "label"):
            self.advance()
            return Acts(ActionSet.of(tok.value))
        if tok.kind == "{":
            return Acts(self.action_set())
        if tok.kind == "!":
            self.advance()
            if self.peek.kind != "{":
                self.fail("expected '{' after '!' in a regular formula")
            return Acts(self.action_set().complement())
        if tok.kind == "(":
            self.advance()
            inner = self.regular()
            self.expect(")", "')'")
            return inner
        self.fail(f"expected a regular formula, found {self.describe(tok)}")

    def action_set(self):
        self.expect("{")
        labels = []
        if self.peek.kind != "}":
            while True:
                tok = self.peek
                if tok.kind not in ("ident", "label"):
                    self.fail(f"expected an action label, found {self.describe(tok)}")
                labels.append(self.advance().value)
                if self.peek.kind != ",":
                    break
                self.advance()
        self.expect("}", "'}' closing the action set")
        return ActionSet(frozenset(labels))


def parse_formula(text):
    p = _Parser(text)
    f = p.formula()
    if p.peek.kind != "eof":
        p.fail(f"unexpected {p.describe(p.peek)} after the formula")
    return f


def parse_regular(text):
    p = _Parser(text)
    r = p.regular()
    if p.peek.kind != "eof":
        p.fail(f"unexpected {p.describe(p.peek)} after the regular formula")
    return r
