"""Reference interpreter for typed IL programs.

Written directly over the surface AST so that it can serve as an oracle for
the translator. Every executed statement, loop iteration and lambda
application costs one budget step.
"""
from __future__ import annotations

from collections import ChainMap
from fractions import Fraction

from .. import types as T
from ..values import (
    Budget, DEFAULT_BUDGET, Diverged, EvalFailure, GUARD_NON_BOOL, OutOfBudget,
    PairV, RuntimeErr, Val, checked_div, checked_index, checked_update,
    concat_arrays, group_pairs, replicate, zip_arrays,
)
from .syntax import (
    ArrayLit, Assign, BinOp, BoolLit, Call, Forall, For, Index, IndexAssign,
    IntLit, Lambda, Name, PairExpr, RatLit, Return, UnOp, VarDecl, While,
)
from .typecheck import TypedProgram


class UnboundName(Exception):
    def __init__(self, name):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class IlMachine:
    """Evaluator state for one run: typing facts plus a step budget."""

    def __init__(self, types: dict, coerce, budget: Budget):
        self.types = types
        self.coerce = coerce
        self.budget = budget

    @classmethod
    def for_program(cls, tp: TypedProgram, budget: Budget) -> "IlMachine":
        return cls(tp.types, tp.coerce, budget)

    # -- expressions ------------------------------------------------------
    def eval(self, e, env):
        v = self._eval(e, env)
        if id(e) in self.coerce:
            return Fraction(v)
        return v

    def _eval(self, e, env):
        if isinstance(e, Name):
            try:
                return env[e.name]
            except KeyError:
                raise UnboundName(e.name) from None
        if isinstance(e, IntLit):
            return Fraction(e.value) if self.types.get(id(e)) == T.RAT else e.value
        if isinstance(e, RatLit):
            return e.value
        if isinstance(e, BoolLit):
            return e.value
        if isinstance(e, BinOp):
            return self._binop(e, env)
        if isinstance(e, UnOp):
            v = self.eval(e.operand, env)
            return (not v) if e.op == "!" else -v
        if isinstance(e, Index):
            arr = self.eval(e.array, env)
            return checked_index(arr, self.eval(e.index, env), e.span and str(e.span))
        if isinstance(e, PairExpr):
            left = self.eval(e.left, env)
            return PairV(left, self.eval(e.right, env))
        if isinstance(e, ArrayLit):
            return tuple(self.eval(x, env) for x in e.items)
        if isinstance(e, Call):
            return self._call(e, env)
        if isinstance(e, Forall):
            return self._forall(e.bounds, e.body, env)
        raise TypeError(f"cannot evaluate {type(e).__name__}")

    def _binop(self, e, env):
        op = e.op
        if op == "&&":
            return self.eval(e.left, env) and self.eval(e.right, env)
        if op == "||":
            return self.eval(e.left, env) or self.eval(e.right, env)
        a = self.eval(e.left, env)
        b = self.eval(e.right, env)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return checked_div(a, b, e.span and str(e.span))
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        raise TypeError(f"unknown operator {op}")

    def _forall(self, bounds, body, env):
        if not bounds:
            return bool(self.eval(body, env))
        (name, arr_e), rest = bounds[0], bounds[1:]
        arr = self.eval(arr_e, env)
        for i in range(len(arr)):
            if not self._forall(rest, body, ChainMap({name: i}, env)):
                return False
        return True

    def apply(self, lam: Lambda, args, env):
        self.budget.tick()
        frame = {p.name: a for p, a in zip(lam.params, args)}
        return self.eval(lam.body, ChainMap(frame, env))

    def _apply_elem(self, lam: Lambda, x, env):
        # a two-parameter lambda over a pair destructures it
        if len(lam.params) == 2:
            return self.apply(lam, (x.fst, x.snd), env)
        return self.apply(lam, (x,), env)

    def _call(self, e, env):
        f, args = e.func, e.args
        where = e.span and str(e.span)
        if f == "fst":
            return self.eval(args[0], env).fst
        if f == "snd":
            return self.eval(args[0], env).snd
        if f == "length":
            return len(self.eval(args[0], env))
        if f == "replicate":
            n = self.eval(args[0], env)
            return replicate(n, self.eval(args[1], env), where, self.budget)
        if f == "range":
            a = self.eval(args[0], env)
            b = self.eval(args[1], env)
            self.budget.tick(max(0, b - a))
            return tuple(range(a, b))
        if f == "zip":
            xs = self.eval(args[0], env)
            return zip_arrays(xs, self.eval(args[1], env), where)
        if f == "concat":
            return concat_arrays(self.eval(args[0], env), self.budget)
        if f == "group":
            return group_pairs(self.eval(args[0], env))
        if f == "map":
            xs = self.eval(args[1], env)
            return tuple(self._apply_elem(args[0], x, env) for x in xs)
        if f == "flatMap":
            xs = self.eval(args[1], env)
            return concat_arrays(tuple(self._apply_elem(args[0], x, env) for x in xs), self.budget)
        if f == "fold":
            acc = self.eval(args[1], env)
            for x in self.eval(args[2], env):
                acc = self.apply(args[0], (acc, x), env)
            return acc
        if f == "reduceByKey":
            # the initial value is evaluated once per key, as in its expansion
            out = []
            for kv in group_pairs(self.eval(args[2], env)):
                acc = self.eval(args[1], env)
                for v in kv.snd:
                    acc = self.apply(args[0], (acc, v), env)
                out.append(PairV(kv.fst, acc))
            return tuple(out)
        raise TypeError(f"unknown builtin {f}")

    # -- statements -------------------------------------------------------
    def exec_stmt(self, s, env: dict, declared: list):
        """Run one statement; names it declares are appended to ``declared``."""
        self.budget.tick()
        if isinstance(s, VarDecl):
            env[s.name] = self.eval(s.init, env)
            declared.append(s.name)
        elif isinstance(s, Assign):
            env[s.name] = self.eval(s.value, env)
        elif isinstance(s, IndexAssign):
            i = self.eval(s.index, env)
            v = self.eval(s.value, env)
            env[s.name] = checked_update(env[s.name], i, v, s.span and str(s.span))
        elif isinstance(s, For):
            xs = self.eval(s.iterable, env)
            for x in xs:
                env[s.var] = x
                self.exec_block(s.body, env)
            env.pop(s.var, None)
        elif isinstance(s, While):
            while self.guard(s.cond, env):
                self.exec_block(s.body, env)
        elif isinstance(s, Return):
            return self.eval(s.value, env)
        else:
            raise TypeError(f"cannot execute {type(s).__name__}")
        return None

    def guard(self, cond, env) -> bool:
        self.budget.tick()
        c = self.eval(cond, env)
        if not isinstance(c, bool):
            raise EvalFailure(GUARD_NON_BOOL, cond.span and str(cond.span))
        return c

    def exec_block(self, stmts, env: dict):
        declared: list = []
        for s in stmts:
            self.exec_stmt(s, env, declared)
        for name in declared:
            del env[name]


def run_outcome(thunk):
    """Run ``thunk`` and convert interpreter exceptions into an outcome."""
    try:
        return Val(thunk())
    except EvalFailure as exc:
        return RuntimeErr(exc.kind, exc.where)
    except OutOfBudget as exc:
        return Diverged(exc.steps)


def interpret_il(tp: TypedProgram, args, budget: int = DEFAULT_BUDGET):
    """Run ``tp`` on ``args``: returns Val, Diverged or RuntimeErr."""
    params = tp.program.params
    if len(args) != len(params):
        raise ValueError(f"{tp.name} expects {len(params)} arguments, got {len(args)}")
    machine = IlMachine.for_program(tp, Budget(budget))

    def body():
        env = {p.name: a for p, a in zip(params, args)}
        declared: list = []
        result = None
        for s in tp.program.body:
            result = machine.exec_stmt(s, env, declared)
        return result

    return run_outcome(body)
