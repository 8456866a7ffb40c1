"""Big-step, call-by-value evaluator for FFL.

Environments are cons cells ``(value, rest)`` so that de Bruijn lookup is a
short walk. Each beta step and each primitive application costs one budget
step; ``iter`` costs one step per round, so a non-terminating loop always
ends in ``Diverged``.
"""
from __future__ import annotations

from fractions import Fraction

from .. import values as V
from ..values import (
    Budget, DEFAULT_BUDGET, EvalFailure, FunctionValue, GUARD_NON_BOOL,
    InlV, InrV, PairV, UNIT_V,
)
from .terms import (
    App, ArrLit, Case, Fst, If, Inl, Inr, Lam, Lit, Pair, Prim, Probe, Snd,
    Term, UnitLit, Var,
)


class Closure(FunctionValue):
    __slots__ = ("body", "env")

    def __init__(self, body, env):
        self.body = body
        self.env = env


class IterFn(FunctionValue):
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn


class Evaluator:
    def __init__(self, budget: Budget, probes: list | None = None):
        self.budget = budget
        self.probes = probes

    def lookup(self, env, i):
        while i:
            env = env[1]
            i -= 1
        return env[0]

    def eval(self, t: Term, env=None):
        if isinstance(t, Var):
            return self.lookup(env, t.index)
        if isinstance(t, App):
            fn = self.eval(t.fn, env)
            return self.apply(fn, self.eval(t.arg, env))
        if isinstance(t, Lam):
            return Closure(t.body, env)
        if isinstance(t, Prim):
            return self.prim(t, env)
        if isinstance(t, Lit):
            return t.value
        if isinstance(t, Fst):
            return self.eval(t.pair, env).fst
        if isinstance(t, Snd):
            return self.eval(t.pair, env).snd
        if isinstance(t, Pair):
            left = self.eval(t.left, env)
            return PairV(left, self.eval(t.right, env))
        if isinstance(t, If):
            c = self.eval(t.cond, env)
            if not isinstance(c, bool):
                raise EvalFailure(GUARD_NON_BOOL)
            return self.eval(t.then if c else t.orelse, env)
        if isinstance(t, UnitLit):
            return UNIT_V
        if isinstance(t, Inl):
            return InlV(self.eval(t.value, env))
        if isinstance(t, Inr):
            return InrV(self.eval(t.value, env))
        if isinstance(t, Case):
            s = self.eval(t.scrut, env)
            if isinstance(s, InlV):
                return self.eval(t.left, (s.value, env))
            return self.eval(t.right, (s.value, env))
        if isinstance(t, ArrLit):
            return tuple(self.eval(x, env) for x in t.items)
        if isinstance(t, Probe):
            self.probe(t, env)
            return self.eval(t.body, env)
        raise TypeError(f"cannot evaluate {type(t).__name__}")

    def probe(self, t: Probe, env):
        if self.probes is None:
            return
        try:
            result = self.eval(t.check, env)
        except EvalFailure as exc:
            result = exc
        self.probes.append((t.tag, result))

    def apply(self, fn, arg):
        self.budget.tick()
        if isinstance(fn, Closure):
            return self.eval(fn.body, (arg, fn.env))
        if isinstance(fn, IterFn):
            state = arg
            while True:
                self.budget.tick()
                r = self.apply(fn.fn, state)
                if isinstance(r, InlV):
                    return r.value
                state = r.value
        raise TypeError(f"cannot apply {fn!r}")

    def prim(self, t: Prim, env):
        op = t.op
        if op == "and":
            return self.eval(t.args[0], env) and self.eval(t.args[1], env)
        if op == "or":
            return self.eval(t.args[0], env) or self.eval(t.args[1], env)
        if op == "reduceByKey":
            return self.reduce_by_key(t, env)
        args = [self.eval(a, env) for a in t.args]
        self.budget.tick()
        return _PRIMS[op](self, *args)

    def reduce_by_key(self, t: Prim, env):
        # f and init are evaluated per key, after the pairs, exactly as in
        # map(λp. (fst p, fold(f, init, snd p)), group(xs))
        f_t, init_t, xs_t = t.args
        groups = V.group_pairs(self.eval(xs_t, env))
        self.budget.tick()
        out = []
        for kv in groups:
            self.budget.tick()
            f = self.eval(f_t, env)
            out.append(PairV(kv.fst, self.fold(f, self.eval(init_t, env), kv.snd)))
        return tuple(out)

    def fold(self, f, acc, xs):
        for x in xs:
            acc = self.apply(self.apply(f, acc), x)
        return acc


def _range(ev, a, b):
    ev.budget.tick(max(0, b - a))
    return tuple(range(a, b))


def _map(ev, f, xs):
    return tuple(ev.apply(f, x) for x in xs)


_PRIMS = {
    "index": lambda ev, a, i: V.checked_index(a, i),
    "update": lambda ev, a, i, v: V.checked_update(a, i, v),
    "length": lambda ev, a: len(a),
    "replicate": lambda ev, n, x: V.replicate(n, x, budget=ev.budget),
    "range": _range,
    "zip": lambda ev, a, b: V.zip_arrays(a, b),
    "map": _map,
    "concat": lambda ev, a: V.concat_arrays(a, ev.budget),
    "group": lambda ev, a: V.group_pairs(a),
    "fold": lambda ev, f, acc, xs: ev.fold(f, acc, xs),
    "iter": lambda ev, f: IterFn(f),
    "flatMap": lambda ev, f, xs: V.concat_arrays(_map(ev, f, xs), ev.budget),
    "add": lambda ev, a, b: a + b,
    "sub": lambda ev, a, b: a - b,
    "mul": lambda ev, a, b: a * b,
    "div": lambda ev, a, b: V.checked_div(a, b),
    "neg": lambda ev, a: -a,
    "lt": lambda ev, a, b: a < b,
    "le": lambda ev, a, b: a <= b,
    "gt": lambda ev, a, b: a > b,
    "ge": lambda ev, a, b: a >= b,
    "eq": lambda ev, a, b: a == b,
    "ne": lambda ev, a, b: a != b,
    "not": lambda ev, a: not a,
    "torat": lambda ev, a: Fraction(a),
}


def _outcome(thunk):
    try:
        return V.Val(thunk())
    except EvalFailure as exc:
        return V.RuntimeErr(exc.kind, exc.where)
    except V.OutOfBudget as exc:
        return V.Diverged(exc.steps)


def evaluate(t: Term, budget: int = DEFAULT_BUDGET, probes: list | None = None):
    """Evaluate a closed term to Val, Diverged or RuntimeErr."""
    ev = Evaluator(Budget(budget), probes)
    return _outcome(lambda: ev.eval(t, None))


def run_function(t: Term, args, budget: int = DEFAULT_BUDGET, probes: list | None = None):
    """Evaluate ``t`` to a curried function and apply it to runtime ``args``."""
    ev = Evaluator(Budget(budget), probes)

    def go():
        fn = ev.eval(t, None)
        for a in args:
            fn = ev.apply(fn, a)
        return fn

    return _outcome(go)
