"""Seeded input generators for differential and obligation testing.

Each trial draws from its own ``random.Random`` seeded by ``(seed, trial)``,
so any single trial can be replayed in isolation. The first few trials use
boundary values (empty and singleton arrays, the smallest graphs).

Constraint vocabulary, keyed by parameter name:

``graph``
    ``[[Int]]`` adjacency list: 1..maxGraph pages, every target in range,
    no duplicate targets, out-degree >= 1.
``open_unit``
    ``Rat`` strictly between 0 and 1.
``counter``
    ``Int`` in ``[0, maxIter]``.
``nonneg``
    ``Int`` in ``[0, 8]``.

plus ``same_length``: a list of name groups whose arrays share one length.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from . import types as T
from .values import InlV, InrV, PairV, UNIT_V

CONSTRAINT_KINDS = ("graph", "open_unit", "counter", "nonneg")
BOUNDARY_GRAPHS = (((0,),), ((1,), (0,)), ((1,), (1,)))


class GeneratorError(Exception):
    """The requested type or constraint cannot be generated."""


@dataclass(frozen=True)
class GenConfig:
    trials: int = 200
    seed: int = 42
    max_len: int = 6
    int_lo: int = -8
    int_hi: int = 8
    max_graph: int = 6
    max_iter: int = 3


@dataclass(frozen=True)
class Constraints:
    per_param: tuple = ()  # ((name, kind), ...)
    same_length: tuple = ()  # (("xs", "ys"), ...)

    @classmethod
    def from_json(cls, data: Optional[dict]) -> "Constraints":
        data = dict(data or {})
        groups = data.pop("same_length", [])
        if not isinstance(groups, list) or not all(isinstance(g, list) for g in groups):
            raise GeneratorError("same_length must be a list of name lists")
        for name, kind in data.items():
            if kind not in CONSTRAINT_KINDS:
                raise GeneratorError(f"unknown constraint {kind!r} for {name!r}")
        return cls(tuple(sorted(data.items())), tuple(tuple(g) for g in groups))

    def kind_of(self, name: str) -> Optional[str]:
        return dict(self.per_param).get(name)

    def group_of(self, name: str) -> Optional[int]:
        for i, g in enumerate(self.same_length):
            if name in g:
                return i
        return None


def check_generable(ty: T.Type):
    if isinstance(ty, (T.Arrow, T.Fun)):
        raise GeneratorError(f"cannot generate values of function type {ty}")
    for child in _children(ty):
        check_generable(child)


def _children(ty):
    if isinstance(ty, T.Arr):
        return (ty.elem,)
    if isinstance(ty, (T.Prod, T.Sum)):
        return (ty.left, ty.right)
    return ()


class _Draw:
    def __init__(self, rng: random.Random, cfg: GenConfig, boundary: Optional[int]):
        self.rng = rng
        self.cfg = cfg
        self.boundary = boundary  # index of the boundary case, or None

    def length(self) -> int:
        if self.boundary is not None:
            return min(self.boundary, self.cfg.max_len)
        return self.rng.randint(0, self.cfg.max_len)

    def value(self, ty: T.Type, length: Optional[int] = None):
        r = self.rng
        if isinstance(ty, T.IntT):
            return r.randint(self.cfg.int_lo, self.cfg.int_hi)
        if isinstance(ty, T.RatT):
            return Fraction(r.randint(self.cfg.int_lo, self.cfg.int_hi), r.randint(1, 8))
        if isinstance(ty, T.BoolT):
            return r.random() < 0.5
        if isinstance(ty, T.UnitT):
            return UNIT_V
        if isinstance(ty, T.Arr):
            n = self.length() if length is None else length
            inner = _Draw(r, self.cfg, None)
            return tuple(inner.value(ty.elem) for _ in range(n))
        if isinstance(ty, T.Prod):
            return PairV(self.value(ty.left), self.value(ty.right))
        if isinstance(ty, T.Sum):
            if r.random() < 0.5:
                return InlV(self.value(ty.left))
            return InrV(self.value(ty.right))
        raise GeneratorError(f"cannot generate values of type {ty}")

    def constrained(self, kind: str, ty: T.Type):
        r, cfg = self.rng, self.cfg
        if kind == "graph":
            if ty != T.Arr(T.Arr(T.INT)):
                raise GeneratorError(f"graph constraint needs [[Int]], got {ty}")
            if self.boundary is not None and self.boundary < len(BOUNDARY_GRAPHS):
                return BOUNDARY_GRAPHS[self.boundary]
            return random_graph(r, cfg.max_graph)
        if kind == "open_unit":
            if ty != T.RAT:
                raise GeneratorError(f"open_unit constraint needs Rat, got {ty}")
            if self.boundary == 0:
                return Fraction(1, 2)
            q = r.randint(2, 12)
            return Fraction(r.randint(1, q - 1), q)
        if kind in ("counter", "nonneg"):
            if ty != T.INT:
                raise GeneratorError(f"{kind} constraint needs Int, got {ty}")
            hi = cfg.max_iter if kind == "counter" else 8
            if self.boundary is not None:
                return min(self.boundary, hi)
            return r.randint(0, hi)
        raise GeneratorError(f"unknown constraint {kind!r}")


def random_graph(rng: random.Random, max_pages: int):
    n = rng.randint(1, max(1, max_pages))
    return tuple(
        tuple(rng.sample(range(n), rng.randint(1, n)))
        for _ in range(n)
    )


BOUNDARY_TRIALS = 3


def gen_one(params, constraints: Constraints, seed: int, trial: int, cfg: GenConfig = GenConfig()):
    """Arguments for one trial; a pure function of ``(seed, trial)``."""
    rng = random.Random(f"{seed}:{trial}")
    boundary = trial if trial < BOUNDARY_TRIALS else None
    draw = _Draw(rng, cfg, boundary)
    lengths: dict = {}
    out = []
    for name, ty in params:
        check_generable(ty)
        kind = constraints.kind_of(name)
        if kind is not None:
            out.append(draw.constrained(kind, ty))
            continue
        group = constraints.group_of(name)
        if group is not None and isinstance(ty, T.Arr):
            if group not in lengths:
                lengths[group] = draw.length()
            out.append(draw.value(ty, lengths[group]))
        else:
            out.append(draw.value(ty))
    return tuple(out)


def gen_inputs(params, constraints: Constraints = Constraints(), seed: int = 42,
               cfg: GenConfig = GenConfig(), trials: Optional[int] = None) -> Iterator[tuple]:
    """Deterministic stream of argument tuples for ``params`` ((name, type) pairs)."""
    for ty in (ty for _, ty in params):
        check_generable(ty)
    n = cfg.trials if trials is None else trials
    for t in range(n):
        yield gen_one(params, constraints, seed, t, cfg)
