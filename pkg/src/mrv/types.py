"""Types shared by the IL frontend and the functional core.

IL types are a subset of the core types plus ``Fun``, which only ever
appears as the type of a lambda passed to a builtin.
"""
from __future__ import annotations

from dataclasses import dataclass


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class IntT(Type):
    def __str__(self):
        return "Int"


@dataclass(frozen=True)
class RatT(Type):
    def __str__(self):
        return "Rat"


@dataclass(frozen=True)
class BoolT(Type):
    def __str__(self):
        return "Bool"


@dataclass(frozen=True)
class UnitT(Type):
    def __str__(self):
        return "Unit"


@dataclass(frozen=True)
class Arr(Type):
    elem: Type

    def __str__(self):
        return f"[{self.elem}]"


@dataclass(frozen=True)
class Prod(Type):
    left: Type
    right: Type

    def __str__(self):
        # '*' binds tighter than '+' and is right-associative
        left = f"({self.left})" if isinstance(self.left, (Prod, Sum, Arrow, Fun)) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, (Sum, Arrow, Fun)) else str(self.right)
        return f"{left} * {right}"


@dataclass(frozen=True)
class Sum(Type):
    left: Type
    right: Type

    def __str__(self):
        left = f"({self.left})" if isinstance(self.left, (Sum, Arrow, Fun)) else str(self.left)
        right = f"({self.right})" if isinstance(self.right, (Arrow, Fun)) else str(self.right)
        return f"{left} + {right}"


@dataclass(frozen=True)
class Arrow(Type):
    arg: Type
    result: Type

    def __str__(self):
        arg = f"({self.arg})" if isinstance(self.arg, (Arrow, Fun)) else str(self.arg)
        return f"{arg} -> {self.result}"


@dataclass(frozen=True)
class Fun(Type):
    """IL lambda type: ``(p1, ..., pn) => result``."""

    params: tuple
    result: Type

    def __str__(self):
        return f"({', '.join(map(str, self.params))}) => {self.result}"


INT = IntT()
RAT = RatT()
BOOL = BoolT()
UNIT = UnitT()

NUMERIC = (INT, RAT)


def is_first_order(ty: Type) -> bool:
    """True when no function type occurs anywhere inside ``ty``."""
    if isinstance(ty, (Arrow, Fun)):
        return False
    if isinstance(ty, Arr):
        return is_first_order(ty.elem)
    if isinstance(ty, (Prod, Sum)):
        return is_first_order(ty.left) and is_first_order(ty.right)
    return True


def arrows(params, result: Type) -> Type:
    """Right-nested curried arrow over ``params``."""
    out = result
    for p in reversed(list(params)):
        out = Arrow(p, out)
    return out
