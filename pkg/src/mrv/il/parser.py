"""Lexer and recursive-descent parser for IL.

Grammar (informal)::

    program  := 'fn' IDENT '(' [param {',' param}] ')' ['->' type] block
    param    := IDENT ':' type
    block    := '{' {stmt} '}'
    stmt     := 'var' IDENT [':' type] (':=' | '=') expr ';'
              | IDENT ':=' expr ';'
              | IDENT '[' expr ']' ':=' expr ';'
              | 'for' '(' IDENT ':' expr ')' block
              | 'while' '(' expr ')' block
              | 'return' expr ';'
    type     := prodty ['+' type]
    prodty   := atomty ['*' prodty]
    atomty   := 'Int' | 'Rat' | 'Bool' | '[' type ']' | '(' type ')'

Expression precedence, loosest first: lambda/forall, ``||``, ``&&``,
comparisons (non-associative), ``+ -``, ``* /``, prefix ``- ! fst snd``,
postfix indexing, primaries.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .. import types as T
from .syntax import (
    ArrayLit, Assign, BinOp, BoolLit, Call, Forall, For, Index, IndexAssign,
    IntLit, Lambda, Name, PairExpr, Param, Program, RatLit, Return, Span,
    UnOp, VarDecl, While,
)


class ParseError(Exception):
    def __init__(self, line: int, col: int, message: str, expected=(), filename: Optional[str] = None):
        self.line = line
        self.col = col
        self.message = message
        self.expected = frozenset(expected)
        self.filename = filename
        super().__init__(self.render())

    def render(self) -> str:
        where = f"{self.filename}:" if self.filename else ""
        msg = self.message
        if self.expected:
            msg += f" (expected one of: {', '.join(sorted(self.expected))})"
        return f"{where}{self.line}:{self.col}: {msg}"


KEYWORDS = {"fn", "var", "for", "while", "return", "true", "false", "forall", "in",
            "Int", "Rat", "Bool"}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<dec>\d+\.\d*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>:=|=>|->|<=|>=|!=|&&|\|\||[-+*/<>=!()\[\]{},;:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, dec, op, eof
    text: str
    line: int
    col: int

    @property
    def span(self):
        return Span(self.line, self.col)


def tokenize(source: str, filename: Optional[str] = None) -> list:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        col = pos - line_start + 1
        if not m:
            raise ParseError(line, col, f"unexpected character {source[pos]!r}", filename=filename)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("keyword" if text in KEYWORDS else "ident", text, line, col))
        elif kind in ("int", "dec", "op"):
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    tokens.append(Token("eof", "<end of input>", line, pos - line_start + 1))
    return tokens


def _decimal(text: str) -> Fraction:
    whole, _, frac = text.partition(".")
    return Fraction(int(whole + frac) if frac else int(whole), 10 ** len(frac))


class Parser:
    def __init__(self, source: str, filename: Optional[str] = None, allow_forall: bool = False):
        self.filename = filename
        self.toks = tokenize(source, filename)
        self.pos = 0
        self.allow_forall = allow_forall

    # -- token helpers ----------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, *texts) -> bool:
        return self.tok.kind in ("op", "keyword") and self.tok.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def error(self, message: str, expected=()):
        t = self.tok
        raise ParseError(t.line, t.col, message, expected, self.filename)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.error(f"unexpected {self.tok.text!r}", {repr(text)})
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error(f"unexpected {self.tok.text!r}", {"identifier"})
        return self.advance()

    def expect_eof(self):
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r} after end of input", {"<end of input>"})

    # -- programs ---------------------------------------------------------
    def program(self) -> Program:
        start = self.expect("fn")
        name = self.ident().text
        self.expect("(")
        params = []
        if not self.at(")"):
            params.append(self.param())
            while self.at(","):
                self.advance()
                params.append(self.param())
        self.expect(")")
        ret = None
        if self.at("->"):
            self.advance()
            ret = self.type()
        body = self.block()
        self.expect_eof()
        return Program(name, tuple(params), ret, body, span=start.span)

    def param(self) -> Param:
        t = self.ident()
        self.expect(":")
        return Param(t.text, self.type(), span=t.span)

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                self.error("unterminated block", {"'}'"})
            stmts.append(self.stmt())
        self.expect("}")
        return tuple(stmts)

    def stmt(self):
        t = self.tok
        if self.at("var"):
            self.advance()
            name = self.ident().text
            ty = None
            if self.at(":"):
                self.advance()
                ty = self.type()
            if not self.at(":=", "="):
                self.error(f"unexpected {self.tok.text!r}", {"':='"})
            self.advance()
            init = self.expr()
            self.expect(";")
            return VarDecl(name, ty, init, span=t.span)
        if self.at("for"):
            self.advance()
            self.expect("(")
            var = self.ident().text
            self.expect(":")
            iterable = self.expr()
            self.expect(")")
            return For(var, iterable, self.block(), span=t.span)
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return While(cond, self.block(), span=t.span)
        if self.at("return"):
            self.advance()
            value = self.expr()
            self.expect(";")
            return Return(value, span=t.span)
        if t.kind == "ident":
            name = self.advance().text
            if self.at("["):
                self.advance()
                idx = self.expr()
                self.expect("]")
                self.expect(":=")
                value = self.expr()
                self.expect(";")
                return IndexAssign(name, idx, value, span=t.span)
            self.expect(":=")
            value = self.expr()
            self.expect(";")
            return Assign(name, value, span=t.span)
        self.error(f"unexpected {t.text!r}", {"statement"})

    # -- types ------------------------------------------------------------
    def type(self) -> T.Type:
        left = self.prod_type()
        if self.at("+"):
            self.advance()
            return T.Sum(left, self.type())
        return left

    def prod_type(self) -> T.Type:
        left = self.atom_type()
        if self.at("*"):
            self.advance()
            return T.Prod(left, self.prod_type())
        return left

    def atom_type(self) -> T.Type:
        t = self.tok
        if t.kind == "keyword" and t.text in ("Int", "Rat", "Bool"):
            self.advance()
            return {"Int": T.INT, "Rat": T.RAT, "Bool": T.BOOL}[t.text]
        if self.at("["):
            self.advance()
            elem = self.type()
            self.expect("]")
            return T.Arr(elem)
        if self.at("("):
            self.advance()
            inner = self.type()
            self.expect(")")
            return inner
        self.error(f"unexpected {t.text!r}", {"type"})

    # -- expressions ------------------------------------------------------
    def expr(self):
        if self.at("forall"):
            return self.forall()
        if self._lambda_ahead():
            return self.lambda_()
        return self.or_expr()

    def _lambda_ahead(self) -> bool:
        return self.at("(") and self.peek().kind == "ident" and self.peek(2).kind == "op" and self.peek(2).text == ":"

    def lambda_(self):
        start = self.tok
        params = []
        while self._lambda_ahead():
            self.advance()
            name = self.ident()
            self.expect(":")
            params.append(Param(name.text, self.type(), span=name.span))
            self.expect(")")
        self.expect("=>")
        return Lambda(tuple(params), self.expr(), span=start.span)

    def forall(self):
        start = self.advance()
        if not self.allow_forall:
            raise ParseError(start.line, start.col, "'forall' is only allowed in coupling predicates",
                             filename=self.filename)
        bounds = []
        while True:
            name = self.ident().text
            self.expect("in")
            bounds.append((name, self.or_expr()))
            if not self.at(","):
                break
            self.advance()
        self.expect(":")
        return Forall(tuple(bounds), self.expr(), span=start.span)

    def _binary(self, ops, sub):
        left = sub()
        while self.at(*ops):
            t = self.advance()
            left = BinOp(t.text, left, sub(), span=t.span)
        return left

    def or_expr(self):
        return self._binary(("||",), self.and_expr)

    def and_expr(self):
        return self._binary(("&&",), self.cmp_expr)

    def cmp_expr(self):
        left = self.add_expr()
        if self.at("=", "!=", "<", "<=", ">", ">="):
            t = self.advance()
            left = BinOp(t.text, left, self.add_expr(), span=t.span)
            if self.at("=", "!=", "<", "<=", ">", ">="):
                self.error("comparison operators do not chain")
        return left

    def add_expr(self):
        return self._binary(("+", "-"), self.mul_expr)

    def mul_expr(self):
        return self._binary(("*", "/"), self.unary)

    def unary(self):
        t = self.tok
        if self.at("-", "!"):
            self.advance()
            return UnOp(t.text, self.unary(), span=t.span)
        if t.kind == "ident" and t.text in ("fst", "snd"):
            # prefix form: ``fst e`` and ``fst(e)`` both parse here
            self.advance()
            return Call(t.text, (self.unary(),), span=t.span)
        return self.postfix()

    def postfix(self):
        e = self.primary()
        while self.at("["):
            t = self.advance()
            idx = self.expr()
            self.expect("]")
            e = Index(e, idx, span=t.span)
        return e

    def primary(self):
        t = self.tok
        if self.at("forall"):
            # a quantifier extends as far right as possible
            return self.forall()
        if t.kind == "int":
            self.advance()
            return IntLit(int(t.text), span=t.span)
        if t.kind == "dec":
            self.advance()
            return RatLit(_decimal(t.text), span=t.span)
        if self.at("true", "false"):
            self.advance()
            return BoolLit(t.text == "true", span=t.span)
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    args.append(self.expr())
                    while self.at(","):
                        self.advance()
                        args.append(self.expr())
                self.expect(")")
                return Call(t.text, tuple(args), span=t.span)
            return Name(t.text, span=t.span)
        if self.at("("):
            if self._lambda_ahead():
                return self.lambda_()
            self.advance()
            first = self.expr()
            if self.at(","):
                self.advance()
                second = self.expr()
                self.expect(")")
                return PairExpr(first, second, span=t.span)
            self.expect(")")
            return first
        if self.at("["):
            self.advance()
            items = []
            if not self.at("]"):
                items.append(self.expr())
                while self.at(","):
                    self.advance()
                    items.append(self.expr())
            self.expect("]")
            return ArrayLit(tuple(items), span=t.span)
        self.error(f"unexpected {t.text!r}", {"expression"})


def parse_program(source: str, filename: Optional[str] = None) -> Program:
    """Parse one IL function. Raises :class:`ParseError` on malformed input."""
    return Parser(source, filename).program()


def parse_expr(source: str, filename: Optional[str] = None, allow_forall: bool = False):
    p = Parser(source, filename, allow_forall=allow_forall)
    e = p.expr()
    p.expect_eof()
    return e


def parse_expr_list(source: str, filename: Optional[str] = None) -> list:
    """Comma-separated expressions, as used for ``mrv run --args``."""
    p = Parser(source, filename)
    out = []
    if p.tok.kind != "eof":
        out.append(p.expr())
        while p.at(","):
            p.advance()
            out.append(p.expr())
    p.expect_eof()
    return out


def parse_type(source: str) -> T.Type:
    p = Parser(source)
    ty = p.type()
    p.expect_eof()
    return ty
