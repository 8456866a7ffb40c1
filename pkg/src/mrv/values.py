"""Runtime values and evaluation outcomes shared by both interpreters.

Representation:

* ``Int``  -> ``int`` (never ``bool``)
* ``Rat``  -> ``fractions.Fraction`` (always normalized, denominator > 0)
* ``Bool`` -> ``bool``
* ``Unit`` -> :data:`UNIT_V`
* arrays   -> ``tuple``
* pairs    -> :class:`PairV`
* sums     -> :class:`InlV` / :class:`InrV`

Closures are defined by the core evaluator.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from . import types as T


@dataclass(frozen=True)
class PairV:
    fst: Any
    snd: Any


@dataclass(frozen=True)
class InlV:
    value: Any


@dataclass(frozen=True)
class InrV:
    value: Any


class _UnitV:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNIT_V"

    def __reduce__(self):
        return (_UnitV, ())


UNIT_V = _UnitV()


class FunctionValue:
    """Base class for closures and other applicable runtime values."""

    __slots__ = ()


def render_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, tuple):
        return "[" + ", ".join(render_value(x) for x in v) + "]"
    if isinstance(v, PairV):
        return f"({render_value(v.fst)}, {render_value(v.snd)})"
    if isinstance(v, InlV):
        return f"inl({render_value(v.value)})"
    if isinstance(v, InrV):
        return f"inr({render_value(v.value)})"
    if v is UNIT_V:
        return "()"
    return f"<{type(v).__name__}>"


def value_has_type(v, ty: T.Type) -> bool:
    """Structural membership check used by the type-preservation properties."""
    if isinstance(ty, T.IntT):
        return isinstance(v, int) and not isinstance(v, bool)
    if isinstance(ty, T.RatT):
        return isinstance(v, Fraction) and v.denominator > 0
    if isinstance(ty, T.BoolT):
        return isinstance(v, bool)
    if isinstance(ty, T.UnitT):
        return v is UNIT_V
    if isinstance(ty, T.Arr):
        return isinstance(v, tuple) and all(value_has_type(x, ty.elem) for x in v)
    if isinstance(ty, T.Prod):
        return isinstance(v, PairV) and value_has_type(v.fst, ty.left) and value_has_type(v.snd, ty.right)
    if isinstance(ty, T.Sum):
        if isinstance(v, InlV):
            return value_has_type(v.value, ty.left)
        if isinstance(v, InrV):
            return value_has_type(v.value, ty.right)
        return False
    if isinstance(ty, (T.Arrow, T.Fun)):
        return isinstance(v, FunctionValue)
    return False


# -- outcomes -------------------------------------------------------------

INDEX_OOB = "IndexOOB"
DIV_ZERO = "DivZero"
GUARD_NON_BOOL = "GuardNonBool"
INVALID_ARGUMENT = "InvalidArgument"


@dataclass(frozen=True)
class Val:
    value: Any

    def __str__(self):
        return render_value(self.value)


@dataclass(frozen=True)
class Diverged:
    steps: int

    def __str__(self):
        return f"diverged after {self.steps} steps"


@dataclass(frozen=True)
class RuntimeErr:
    kind: str
    where: Optional[str] = None

    def __str__(self):
        return f"runtime error {self.kind}" + (f" at {self.where}" if self.where else "")


def same_outcome(a, b) -> bool:
    """Outcome agreement: exact values, Diverged vs Diverged, same error kind."""
    if isinstance(a, Val) and isinstance(b, Val):
        return a.value == b.value
    if isinstance(a, Diverged) and isinstance(b, Diverged):
        return True
    if isinstance(a, RuntimeErr) and isinstance(b, RuntimeErr):
        return a.kind == b.kind
    return False


class EvalFailure(Exception):
    """Raised inside interpreters; converted to an outcome at the boundary."""

    def __init__(self, kind: str, where: Optional[str] = None):
        super().__init__(f"{kind} at {where}" if where else kind)
        self.kind = kind
        self.where = where


class OutOfBudget(Exception):
    def __init__(self, steps: int):
        super().__init__(f"budget exhausted after {steps} steps")
        self.steps = steps


class Budget:
    """Step counter shared by one evaluation."""

    __slots__ = ("limit", "used")

    def __init__(self, limit: int):
        self.limit = limit
        self.used = 0

    def tick(self, n: int = 1):
        self.used += n
        if self.used > self.limit:
            raise OutOfBudget(self.used)


DEFAULT_BUDGET = 10**6


def to_rat(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def checked_div(a, b, where=None) -> Fraction:
    if b == 0:
        raise EvalFailure(DIV_ZERO, where)
    return to_rat(a) / to_rat(b)


def checked_index(arr: tuple, i: int, where=None):
    if not 0 <= i < len(arr):
        raise EvalFailure(INDEX_OOB, where)
    return arr[i]


def checked_update(arr: tuple, i: int, v, where=None) -> tuple:
    if not 0 <= i < len(arr):
        raise EvalFailure(INDEX_OOB, where)
    return arr[:i] + (v,) + arr[i + 1:]


def replicate(n: int, x, where=None, budget: Optional["Budget"] = None) -> tuple:
    if n < 0:
        raise EvalFailure(INVALID_ARGUMENT, where)
    if budget is not None:
        budget.tick(n)
    return (x,) * n


def zip_arrays(xs: tuple, ys: tuple, where=None) -> tuple:
    if len(xs) != len(ys):
        raise EvalFailure(INVALID_ARGUMENT, where)
    return tuple(PairV(a, b) for a, b in zip(xs, ys))


def group_pairs(kvs: tuple) -> tuple:
    """Keys in first-occurrence order, values in encounter order."""
    buckets: dict = {}
    for kv in kvs:
        buckets.setdefault(_key(kv.fst), (kv.fst, []))[1].append(kv.snd)
    return tuple(PairV(k, tuple(vs)) for k, vs in buckets.values())


def _key(v):
    # bool/int/Fraction hash-collide (True == 1); tag the python type
    return (type(v).__name__, v)


def concat_arrays(xss: tuple, budget: Optional["Budget"] = None) -> tuple:
    # building the result is charged per element, so runaway growth runs out of budget
    if budget is not None:
        budget.tick(sum(len(xs) for xs in xss))
    out: list = []
    for xs in xss:
        out.extend(xs)
    return tuple(out)
