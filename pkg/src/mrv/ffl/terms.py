"""FFL terms in de Bruijn form.

Variables carry an index (0 = innermost binder). Display names on ``Var``
and ``Lam`` are ignored by equality, so ``==`` on terms is alpha-equivalence.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

from ..types import Type


def _display():
    return field(default=None, compare=False, repr=False)


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    index: int
    name: Optional[str] = _display()


@dataclass(frozen=True)
class Lam(Term):
    ty: Type
    body: Term
    name: Optional[str] = _display()


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True)
class Lit(Term):
    value: Any  # int, Fraction or bool
    ty: Type


@dataclass(frozen=True)
class UnitLit(Term):
    pass


@dataclass(frozen=True)
class Pair(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Fst(Term):
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    pair: Term


@dataclass(frozen=True)
class Inl(Term):
    value: Term
    other: Type  # type of the right summand


@dataclass(frozen=True)
class Inr(Term):
    value: Term
    other: Type  # type of the left summand


@dataclass(frozen=True)
class Case(Term):
    """``case scrut of inl x => left | inr y => right``; each branch binds one variable."""

    scrut: Term
    left: Term
    right: Term
    left_name: Optional[str] = _display()
    right_name: Optional[str] = _display()


@dataclass(frozen=True)
class If(Term):
    cond: Term
    then: Term
    orelse: Term


@dataclass(frozen=True)
class ArrLit(Term):
    items: tuple
    elem: Type


@dataclass(frozen=True)
class Prim(Term):
    op: str
    args: tuple


@dataclass(frozen=True)
class Probe(Term):
    """Evaluates ``check`` for its side record, then yields ``body``.

    Used to test a rule obligation in the exact environment where the rule
    fired; never produced by the translator.
    """

    tag: str
    check: Term
    body: Term


PRIM_ARITY = {
    "index": 2, "update": 3, "length": 1, "replicate": 2, "range": 2,
    "zip": 2, "map": 2, "concat": 1, "group": 1, "fold": 3, "iter": 1,
    "flatMap": 2, "reduceByKey": 3,
    "add": 2, "sub": 2, "mul": 2, "div": 2, "neg": 1,
    "lt": 2, "le": 2, "gt": 2, "ge": 2, "eq": 2, "ne": 2,
    "and": 2, "or": 2, "not": 1, "torat": 1,
}
SYNONYMS = ("flatMap", "reduceByKey")


def kids(t: Term) -> tuple:
    """Immediate subterms, in evaluation order."""
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, App):
        return (t.fn, t.arg)
    if isinstance(t, Pair):
        return (t.left, t.right)
    if isinstance(t, (Fst, Snd)):
        return (t.pair,)
    if isinstance(t, (Inl, Inr)):
        return (t.value,)
    if isinstance(t, Case):
        return (t.scrut, t.left, t.right)
    if isinstance(t, If):
        return (t.cond, t.then, t.orelse)
    if isinstance(t, ArrLit):
        return t.items
    if isinstance(t, Prim):
        return t.args
    if isinstance(t, Probe):
        return (t.check, t.body)
    return ()


def binders(t: Term) -> tuple:
    """Number of variables each child of ``t`` sees bound by ``t`` itself."""
    if isinstance(t, Lam):
        return (1,)
    if isinstance(t, Case):
        return (0, 1, 1)
    return (0,) * len(kids(t))


def with_kids(t: Term, new: tuple) -> Term:
    if isinstance(t, Lam):
        return Lam(t.ty, new[0], t.name)
    if isinstance(t, App):
        return App(*new)
    if isinstance(t, Pair):
        return Pair(*new)
    if isinstance(t, Fst):
        return Fst(new[0])
    if isinstance(t, Snd):
        return Snd(new[0])
    if isinstance(t, Inl):
        return Inl(new[0], t.other)
    if isinstance(t, Inr):
        return Inr(new[0], t.other)
    if isinstance(t, Case):
        return Case(new[0], new[1], new[2], t.left_name, t.right_name)
    if isinstance(t, If):
        return If(*new)
    if isinstance(t, ArrLit):
        return ArrLit(tuple(new), t.elem)
    if isinstance(t, Prim):
        return Prim(t.op, tuple(new))
    if isinstance(t, Probe):
        return Probe(t.tag, new[0], new[1])
    return t


def prim(op: str, *args: Term) -> Prim:
    if op not in PRIM_ARITY:
        raise ValueError(f"unknown primitive {op!r}")
    if len(args) != PRIM_ARITY[op]:
        raise ValueError(f"{op} takes {PRIM_ARITY[op]} arguments, got {len(args)}")
    return Prim(op, tuple(args))


def let(ty: Type, value: Term, body: Term, name: Optional[str] = None) -> App:
    """``let name : ty = value in body`` as a beta-redex."""
    return App(Lam(ty, body, name), value)


def size(t: Term) -> int:
    return 1 + sum(size(k) for k in kids(t))
