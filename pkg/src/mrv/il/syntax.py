"""IL abstract syntax.

Nodes are frozen dataclasses. Source spans are excluded from equality so two
parses of equivalent text compare equal structurally; per-node analysis
results are keyed by ``id(node)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from ..types import Type


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


def _span():
    return field(default=None, compare=False, repr=False)


class Expr:
    __slots__ = ()


@dataclass(frozen=True)
class Name(Expr):
    name: str
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class RatLit(Expr):
    value: Fraction
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class UnOp(Expr):
    op: str  # "-" or "!"
    operand: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Index(Expr):
    array: Expr
    index: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class PairExpr(Expr):
    left: Expr
    right: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class ArrayLit(Expr):
    items: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Param:
    name: str
    type: Type
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Lambda(Expr):
    params: tuple  # of Param
    body: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Call(Expr):
    func: str
    args: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Forall(Expr):
    """Bounded quantifier, only legal inside coupling predicates.

    ``bounds`` pairs each bound variable with the array whose valid indices
    it ranges over; later bounds may mention earlier variables.
    """

    bounds: tuple  # of (name, Expr)
    body: Expr
    span: Optional[Span] = _span()


class Stmt:
    __slots__ = ()


@dataclass(frozen=True)
class VarDecl(Stmt):
    name: str
    type: Optional[Type]
    init: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Assign(Stmt):
    name: str
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class IndexAssign(Stmt):
    name: str
    index: Expr
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class For(Stmt):
    var: str
    iterable: Expr
    body: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class While(Stmt):
    cond: Expr
    body: tuple
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Return(Stmt):
    value: Expr
    span: Optional[Span] = _span()


@dataclass(frozen=True)
class Program:
    name: str
    params: tuple  # of Param
    ret: Optional[Type]
    body: tuple
    span: Optional[Span] = _span()


BUILTINS = (
    "length", "replicate", "range", "zip", "map", "fst", "snd", "group",
    "concat", "flatMap", "reduceByKey", "fold",
)


def assigned_names(stmts) -> list:
    """Names assigned anywhere in ``stmts`` (nested loops included), in order."""
    out: list = []

    def visit(ss):
        for s in ss:
            if isinstance(s, (Assign, IndexAssign)):
                if s.name not in out:
                    out.append(s.name)
            elif isinstance(s, (For, While)):
                visit(s.body)

    visit(stmts)
    return out


def iter_exprs(node):
    """Yield every expression node under ``node`` (pre-order)."""
    if isinstance(node, Program):
        for s in node.body:
            yield from iter_exprs(s)
    elif isinstance(node, (VarDecl,)):
        yield from iter_exprs(node.init)
    elif isinstance(node, Assign):
        yield from iter_exprs(node.value)
    elif isinstance(node, IndexAssign):
        yield from iter_exprs(node.index)
        yield from iter_exprs(node.value)
    elif isinstance(node, For):
        yield from iter_exprs(node.iterable)
        for s in node.body:
            yield from iter_exprs(s)
    elif isinstance(node, While):
        yield from iter_exprs(node.cond)
        for s in node.body:
            yield from iter_exprs(s)
    elif isinstance(node, Return):
        yield from iter_exprs(node.value)
    elif isinstance(node, Expr):
        yield node
        for child in _expr_children(node):
            yield from iter_exprs(child)


def _expr_children(e):
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, UnOp):
        return (e.operand,)
    if isinstance(e, Index):
        return (e.array, e.index)
    if isinstance(e, PairExpr):
        return (e.left, e.right)
    if isinstance(e, ArrayLit):
        return e.items
    if isinstance(e, Lambda):
        return (e.body,)
    if isinstance(e, Call):
        return e.args
    if isinstance(e, Forall):
        return tuple(b for _, b in e.bounds) + (e.body,)
    return ()


def free_names(e: Expr) -> set:
    """Variable names referenced by ``e`` that are not bound inside it."""
    out: set = set()

    def visit(x, bound):
        if isinstance(x, Name):
            if x.name not in bound:
                out.add(x.name)
        elif isinstance(x, Lambda):
            visit(x.body, bound | {p.name for p in x.params})
        elif isinstance(x, Forall):
            inner = set(bound)
            for name, arr in x.bounds:
                visit(arr, inner)
                inner = inner | {name}
            visit(x.body, inner)
        else:
            for c in _expr_children(x):
                visit(c, bound)

    visit(e, frozenset())
    return out
