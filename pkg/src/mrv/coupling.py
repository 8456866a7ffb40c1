"""Lockstep checking of coupling invariants between two IL programs.

Both programs are split into prelude, one loop and postlude. The loops are
run side by side on identical generated inputs: guards must agree on every
round, the invariant is checked at the configured annotation point, and
the return values must be equal. This is testing, not proof; a ``Pass``
records how many trials and iterations were exercised.

Predicates are IL expressions over ``name_1`` (source program) and
``name_2`` (target program) variables, plus ``forall i in arr, j in arr2: e``
where each bound variable ranges over the valid indices of its array.

Annotation points:

``"end"`` (default)
    after every full loop iteration.
``"head"``
    after the preludes (loop entry) and after every iteration.
``[k1, k2]``
    inside every iteration, after the first ``k1`` body statements of the
    source loop and ``k2`` of the target loop; lets the invariant mention
    variables declared in the loop body.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import types as T
from .gen import Constraints, GenConfig, gen_one
from .il.interp import IlMachine, UnboundName, interpret_il
from .il.parser import ParseError, parse_expr
from .il.syntax import For, VarDecl, While, free_names
from .il.typecheck import TypedProgram, TypeErrors, typecheck_expr
from .values import (
    Budget, DEFAULT_BUDGET, Diverged, EvalFailure, OutOfBudget, render_value,
    same_outcome,
)

AT_ENTRY = "InvariantBrokenAtEntry"
AFTER_ITERATION = "InvariantBrokenAfterIteration"
GUARD_DISAGREEMENT = "GuardDisagreement"
OUTPUT_MISMATCH = "OutputMismatch"
SIDE_DIVERGENCE = "SideDivergence"
FAIL_KINDS = (AT_ENTRY, AFTER_ITERATION, GUARD_DISAGREEMENT, OUTPUT_MISMATCH, SIDE_DIVERGENCE)


class StructureError(Exception):
    """The programs do not decompose into prelude; loop; postlude."""


class PredicateError(Exception):
    """A coupling predicate failed to parse, type-check or evaluate."""


# -- product structure ------------------------------------------------------

@dataclass(frozen=True)
class Side:
    program: TypedProgram
    prelude: tuple
    loop: Union[While, For]
    postlude: tuple

    @property
    def body(self) -> tuple:
        return self.loop.body


@dataclass(frozen=True)
class ProductLoop:
    left: Side
    right: Side

    @property
    def sides(self):
        return (self.left, self.right)


def _split(tp: TypedProgram, label: str) -> Side:
    body = tp.program.body
    whiles = [i for i, s in enumerate(body) if isinstance(s, While)]
    fors = [i for i, s in enumerate(body) if isinstance(s, For)]
    if len(whiles) > 1:
        raise StructureError(f"{label} has {len(whiles)} top-level while loops; expected one")
    if whiles:
        idx = whiles[0]
    elif len(fors) == 1:
        idx = fors[0]
    elif fors:
        raise StructureError(f"{label} has no while loop and {len(fors)} top-level for loops")
    else:
        raise StructureError(f"{label} has no top-level loop")
    return Side(tp, body[:idx], body[idx], body[idx + 1:])


def build_product(p1: TypedProgram, p2: TypedProgram) -> ProductLoop:
    return ProductLoop(_split(p1, p1.name), _split(p2, p2.name))


# -- predicates ---------------------------------------------------------------

def split_side(name: str):
    base, sep, side = name.rpartition("_")
    if not sep or side not in ("1", "2") or not base:
        return None
    return base, int(side)


def declared_types(tp: TypedProgram) -> dict:
    """Every variable name the program can bind, with its type."""
    out = dict(tp.params)

    def visit(stmts):
        for s in stmts:
            if isinstance(s, VarDecl):
                out[s.name] = s.type if s.type is not None else tp.types[id(s.init)]
            elif isinstance(s, For):
                out[s.var] = tp.types[id(s.iterable)].elem
                visit(s.body)
            elif isinstance(s, While):
                visit(s.body)

    visit(tp.program.body)
    return out


@dataclass
class CouplingPredicate:
    text: str
    expr: object
    types: dict = field(default_factory=dict)
    coerce: frozenset = frozenset()

    @classmethod
    def parse(cls, text: str) -> "CouplingPredicate":
        try:
            expr = parse_expr(text, "<invariant>", allow_forall=True)
        except ParseError as exc:
            raise PredicateError(exc.render()) from exc
        for name in free_names(expr):
            if split_side(name) is None:
                raise PredicateError(f"variable {name!r} lacks a _1 or _2 side suffix")
        return cls(text, expr)

    def typecheck(self, p1: TypedProgram, p2: TypedProgram) -> "CouplingPredicate":
        env = {}
        for side, tp in ((1, p1), (2, p2)):
            for name, ty in declared_types(tp).items():
                env[f"{name}_{side}"] = ty
        for name in free_names(self.expr):
            if name not in env:
                base, side = split_side(name)
                raise PredicateError(f"{base!r} is not a variable of program {side}")
        try:
            typing = typecheck_expr(self.expr, env, expected=T.BOOL)
        except TypeErrors as exc:
            raise PredicateError(str(exc)) from exc
        return CouplingPredicate(self.text, self.expr, typing.types, typing.coerce)

    def evaluate(self, s1: dict, s2: dict) -> bool:
        env = {f"{k}_1": v for k, v in s1.items()}
        env.update({f"{k}_2": v for k, v in s2.items()})
        machine = IlMachine(self.types, self.coerce, Budget(DEFAULT_BUDGET))
        try:
            return machine.eval(self.expr, env) is True
        except UnboundName as exc:
            raise PredicateError(f"unbound variable {exc.name!r} at the annotation point") from exc
        except EvalFailure as exc:
            raise PredicateError(f"{exc.kind} while evaluating the invariant") from exc
        except OutOfBudget as exc:
            raise PredicateError("invariant evaluation exhausted its budget") from exc

    def mentioned(self, side: int) -> list:
        out = []
        for name in sorted(free_names(self.expr)):
            base, s = split_side(name)
            if s == side:
                out.append(base)
        return out


def evaluate_predicate(inv, s1: dict, s2: dict) -> bool:
    """Evaluate ``inv`` (text or parsed) on two program states.

    Raises :class:`PredicateError` for unbound variables or runtime errors.
    """
    if isinstance(inv, str):
        inv = CouplingPredicate.parse(inv)
    return inv.evaluate(s1, s2)


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class Pass:
    trials: int
    iterations: int  # total lockstep iterations over all trials
    per_trial: tuple  # iterations per trial
    checks: int  # invariant evaluations
    errors_agreed: int = 0  # trials where both sides raised the same runtime error

    ok = True

    def summary(self) -> str:
        return (f"empirically validated ({self.trials} trials, {self.iterations} iterations, "
                f"{self.checks} invariant checks)")


@dataclass(frozen=True)
class Fail:
    kind: str
    seed: int
    trial: int
    inputs: tuple
    iteration: Optional[int]
    detail: str
    states: tuple = ()  # (rendered side-1 state, rendered side-2 state)

    ok = False

    def summary(self) -> str:
        args = ", ".join(render_value(a) for a in self.inputs)
        it = f", iteration {self.iteration}" if self.iteration is not None else ""
        return f"{self.kind} (seed {self.seed}, trial {self.trial}{it}) on ({args}): {self.detail}"


def _render_state(state: dict, names) -> str:
    shown = {n: state[n] for n in names if n in state} if names else state
    return "{" + ", ".join(f"{k} = {render_value(v)}" for k, v in shown.items()) + "}"


# -- lockstep execution -----------------------------------------------------------

class _Runner:
    def __init__(self, side: Side, args, budget: int):
        self.side = side
        self.machine = IlMachine.for_program(side.program, Budget(budget))
        self.env = {p.name: a for p, a in zip(side.program.program.params, args)}
        self.declared: list = []
        self.items = None
        self.pos = 0

    def prelude(self):
        for s in self.side.prelude:
            self.machine.exec_stmt(s, self.env, self.declared)
        if isinstance(self.side.loop, For):
            self.items = self.machine.eval(self.side.loop.iterable, self.env)

    def guard(self) -> bool:
        loop = self.side.loop
        if isinstance(loop, While):
            return self.machine.guard(loop.cond, self.env)
        self.machine.budget.tick()
        return self.pos < len(self.items)

    def begin(self):
        self.body_declared: list = []
        if isinstance(self.side.loop, For):
            self.env[self.side.loop.var] = self.items[self.pos]

    def run(self, stmts):
        for s in stmts:
            self.machine.exec_stmt(s, self.env, self.body_declared)

    def end(self):
        for name in self.body_declared:
            del self.env[name]
        if isinstance(self.side.loop, For):
            del self.env[self.side.loop.var]
            self.pos += 1

    def postlude(self):
        result = None
        for s in self.side.postlude:
            result = self.machine.exec_stmt(s, self.env, self.declared)
        return result


def _normalize_at(at):
    if at is None:
        return "end"
    if at in ("end", "head"):
        return at
    if isinstance(at, (list, tuple)) and len(at) == 2 and all(isinstance(k, int) and k >= 0 for k in at):
        return tuple(at)
    raise ValueError(f"bad annotation point {at!r}; use \"end\", \"head\" or [k1, k2]")


def check_coupling(p1: TypedProgram, p2: TypedProgram, inv, cfg: GenConfig = GenConfig(), *,
                   at=None, constraints: Constraints = Constraints(),
                   budget: int = DEFAULT_BUDGET, only_trial: Optional[int] = None):
    """Validate ``inv`` by lockstep execution; returns :class:`Pass` or :class:`Fail`.

    ``only_trial`` re-runs a single trial, e.g. to replay a reported failure.
    """
    if p1.signature != p2.signature:
        raise StructureError("the programs have different parameter or return types")
    product = build_product(p1, p2)
    if isinstance(inv, str):
        inv = CouplingPredicate.parse(inv)
    if not inv.types:
        inv = inv.typecheck(p1, p2)
    point = _normalize_at(at)
    if isinstance(point, tuple):
        for k, side in zip(point, product.sides):
            if k > len(side.body):
                raise StructureError(f"annotation point {k} exceeds the loop body of {side.program.name}")
    names = (inv.mentioned(1), inv.mentioned(2))
    trials = range(cfg.trials) if only_trial is None else [only_trial]
    per_trial = []
    checks = 0
    agreed = 0
    for trial in trials:
        args = gen_one(p1.params, constraints, cfg.seed, trial, cfg)
        result = _trial(product, inv, point, args, budget, names)
        if isinstance(result, _Outcome):
            per_trial.append(result.iterations)
            checks += result.checks
            agreed += result.agreed_error
            continue
        kind, iteration, detail, states = result
        return Fail(kind, cfg.seed, trial, args, iteration, detail, states)
    return Pass(len(per_trial), sum(per_trial), tuple(per_trial), checks, agreed)


@dataclass
class _Outcome:
    iterations: int
    checks: int
    agreed_error: int = 0


def _trial(product: ProductLoop, inv: CouplingPredicate, point, args, budget, names):
    r1 = _Runner(product.left, args, budget)
    r2 = _Runner(product.right, args, budget)
    iteration = None
    checks = 0

    def states():
        return (_render_state(r1.env, names[0]), _render_state(r2.env, names[1]))

    def check(kind):
        nonlocal checks
        checks += 1
        try:
            ok = inv.evaluate(r1.env, r2.env)
        except PredicateError as exc:
            return (kind, iteration, f"invariant could not be evaluated: {exc}", states())
        if not ok:
            return (kind, iteration, f"invariant {inv.text!r} is false", states())
        return None

    try:
        r1.prelude()
        r2.prelude()
        if point == "head":
            bad = check(AT_ENTRY)
            if bad:
                return bad
        iteration = 0
        while True:
            g1, g2 = r1.guard(), r2.guard()
            if g1 != g2:
                return (GUARD_DISAGREEMENT, iteration,
                        f"source loop guard is {g1}, target loop guard is {g2}", states())
            if not g1:
                break
            r1.begin()
            r2.begin()
            if isinstance(point, tuple):
                k1, k2 = point
                r1.run(r1.side.body[:k1])
                r2.run(r2.side.body[:k2])
                bad = check(AFTER_ITERATION)
                if bad:
                    return bad
                r1.run(r1.side.body[k1:])
                r2.run(r2.side.body[k2:])
            else:
                r1.run(r1.side.body)
                r2.run(r2.side.body)
            r1.end()
            r2.end()
            if not isinstance(point, tuple):
                bad = check(AFTER_ITERATION)
                if bad:
                    return bad
            iteration += 1
        v1 = r1.postlude()
        v2 = r2.postlude()
    except OutOfBudget:
        return (SIDE_DIVERGENCE, iteration, "a side exhausted its step budget", states())
    except EvalFailure:
        # re-run both programs on their own and compare whole outcomes
        o1 = interpret_il(product.left.program, args, budget)
        o2 = interpret_il(product.right.program, args, budget)
        if isinstance(o1, Diverged) or isinstance(o2, Diverged):
            return (SIDE_DIVERGENCE, iteration, f"outcomes {o1} and {o2}", ())
        if same_outcome(o1, o2):
            return _Outcome(iteration or 0, checks, 1)
        return (OUTPUT_MISMATCH, iteration, f"source gave {o1}, target gave {o2}", ())
    if v1 != v2:
        return (OUTPUT_MISMATCH, iteration,
                f"source returned {render_value(v1)}, target returned {render_value(v2)}", states())
    return _Outcome(iteration, checks)
