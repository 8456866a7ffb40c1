"""Simple type checking for FFL terms."""
from __future__ import annotations

from fractions import Fraction

from .. import types as T
from .terms import (
    App, ArrLit, Case, Fst, If, Inl, Inr, Lam, Lit, Pair, Prim, Probe, Snd,
    Term, UnitLit, Var, binders, kids,
)


class FflTypeError(Exception):
    """Ill-typed term; ``path`` locates the failing node from the root."""

    def __init__(self, path: tuple, message: str):
        super().__init__(f"at {list(path)}: {message}")
        self.path = path
        self.message = message


def typecheck_term(t: Term, ctx: tuple = ()) -> T.Type:
    """Type of ``t`` under ``ctx`` (``ctx[0]`` is the innermost binder)."""
    return _Check().run(t, tuple(ctx), ())


_NUM = (T.INT, T.RAT)


class _Check:
    def fail(self, path, msg):
        raise FflTypeError(path, msg)

    def run(self, t, ctx, path):
        if isinstance(t, Var):
            if t.index >= len(ctx):
                self.fail(path, f"unbound variable #{t.index}")
            return ctx[t.index]
        if isinstance(t, Lam):
            body = self.run(t.body, (t.ty,) + ctx, path + (0,))
            return T.Arrow(t.ty, body)
        if isinstance(t, App):
            fn = self.run(t.fn, ctx, path + (0,))
            arg = self.run(t.arg, ctx, path + (1,))
            if not isinstance(fn, T.Arrow):
                self.fail(path, f"applying a non-function of type {fn}")
            if fn.arg != arg:
                self.fail(path, f"argument has type {arg}, function expects {fn.arg}")
            return fn.result
        if isinstance(t, Lit):
            ok = {T.INT: int, T.RAT: Fraction, T.BOOL: bool}.get(t.ty)
            if ok is None or not isinstance(t.value, ok) or (t.ty == T.INT and isinstance(t.value, bool)):
                self.fail(path, f"bad literal {t.value!r} : {t.ty}")
            return t.ty
        if isinstance(t, UnitLit):
            return T.UNIT
        if isinstance(t, Pair):
            return T.Prod(self.run(t.left, ctx, path + (0,)), self.run(t.right, ctx, path + (1,)))
        if isinstance(t, (Fst, Snd)):
            p = self.run(t.pair, ctx, path + (0,))
            if not isinstance(p, T.Prod):
                self.fail(path, f"projection from non-pair {p}")
            return p.left if isinstance(t, Fst) else p.right
        if isinstance(t, Inl):
            return T.Sum(self.run(t.value, ctx, path + (0,)), t.other)
        if isinstance(t, Inr):
            return T.Sum(t.other, self.run(t.value, ctx, path + (0,)))
        if isinstance(t, Case):
            s = self.run(t.scrut, ctx, path + (0,))
            if not isinstance(s, T.Sum):
                self.fail(path, f"case on non-sum {s}")
            left = self.run(t.left, (s.left,) + ctx, path + (1,))
            right = self.run(t.right, (s.right,) + ctx, path + (2,))
            if left != right:
                self.fail(path, f"case branches disagree: {left} vs {right}")
            return left
        if isinstance(t, If):
            c = self.run(t.cond, ctx, path + (0,))
            if c != T.BOOL:
                self.fail(path, f"condition has type {c}")
            a = self.run(t.then, ctx, path + (1,))
            b = self.run(t.orelse, ctx, path + (2,))
            if a != b:
                self.fail(path, f"if branches disagree: {a} vs {b}")
            return a
        if isinstance(t, ArrLit):
            for i, item in enumerate(t.items):
                ty = self.run(item, ctx, path + (i,))
                if ty != t.elem:
                    self.fail(path + (i,), f"array item has type {ty}, expected {t.elem}")
            return T.Arr(t.elem)
        if isinstance(t, Probe):
            c = self.run(t.check, ctx, path + (0,))
            if c != T.BOOL:
                self.fail(path, f"probe check has type {c}")
            return self.run(t.body, ctx, path + (1,))
        if isinstance(t, Prim):
            tys = [self.run(a, ctx, path + (i,)) for i, a in enumerate(t.args)]
            return self.prim(t.op, tys, path)
        self.fail(path, f"unknown term {type(t).__name__}")

    def arr(self, ty, path, what):
        if not isinstance(ty, T.Arr):
            self.fail(path, f"{what} expects an array, got {ty}")
        return ty.elem

    def fun(self, ty, path, what):
        if not isinstance(ty, T.Arrow):
            self.fail(path, f"{what} expects a function, got {ty}")
        return ty

    def prim(self, op, tys, path):
        def need(cond, msg):
            if not cond:
                self.fail(path, f"{op}: {msg}")

        if op == "index":
            elem = self.arr(tys[0], path, op)
            need(tys[1] == T.INT, f"index has type {tys[1]}")
            return elem
        if op == "update":
            elem = self.arr(tys[0], path, op)
            need(tys[1] == T.INT, f"index has type {tys[1]}")
            need(tys[2] == elem, f"value has type {tys[2]}, array holds {elem}")
            return tys[0]
        if op == "length":
            self.arr(tys[0], path, op)
            return T.INT
        if op == "replicate":
            need(tys[0] == T.INT, f"count has type {tys[0]}")
            return T.Arr(tys[1])
        if op == "range":
            need(tys[0] == T.INT and tys[1] == T.INT, "bounds must be Int")
            return T.Arr(T.INT)
        if op == "zip":
            return T.Arr(T.Prod(self.arr(tys[0], path, op), self.arr(tys[1], path, op)))
        if op in ("map", "flatMap"):
            f = self.fun(tys[0], path, op)
            elem = self.arr(tys[1], path, op)
            need(f.arg == elem, f"function takes {f.arg}, array holds {elem}")
            if op == "map":
                return T.Arr(f.result)
            need(isinstance(f.result, T.Arr), f"function must return an array, got {f.result}")
            return f.result
        if op == "concat":
            inner = self.arr(tys[0], path, op)
            need(isinstance(inner, T.Arr), f"expects an array of arrays, got {tys[0]}")
            return inner
        if op == "group":
            elem = self.arr(tys[0], path, op)
            need(isinstance(elem, T.Prod), f"expects key-value pairs, got {tys[0]}")
            return T.Arr(T.Prod(elem.left, T.Arr(elem.right)))
        if op == "fold":
            f = self.fun(tys[0], path, op)
            elem = self.arr(tys[2], path, op)
            acc = tys[1]
            need(f == T.Arrow(acc, T.Arrow(elem, acc)),
                 f"function has type {f}, expected {T.Arrow(acc, T.Arrow(elem, acc))}")
            return acc
        if op == "reduceByKey":
            f = self.fun(tys[0], path, op)
            elem = self.arr(tys[2], path, op)
            need(isinstance(elem, T.Prod), f"expects key-value pairs, got {tys[2]}")
            v = elem.right
            need(f == T.Arrow(v, T.Arrow(v, v)), f"function has type {f}")
            need(tys[1] == v, f"initial value has type {tys[1]}, expected {v}")
            return tys[2]
        if op == "iter":
            f = self.fun(tys[0], path, op)
            need(f.result == T.Sum(f.arg, f.arg), f"body must return {T.Sum(f.arg, f.arg)}, got {f.result}")
            return T.Arrow(f.arg, f.arg)
        if op in ("add", "sub", "mul"):
            need(tys[0] in _NUM and tys[0] == tys[1], f"operands {tys[0]}, {tys[1]}")
            return tys[0]
        if op == "div":
            need(tys[0] == T.RAT and tys[1] == T.RAT, f"operands {tys[0]}, {tys[1]}")
            return T.RAT
        if op == "neg":
            need(tys[0] in _NUM, f"operand {tys[0]}")
            return tys[0]
        if op in ("lt", "le", "gt", "ge"):
            need(tys[0] in _NUM and tys[0] == tys[1], f"operands {tys[0]}, {tys[1]}")
            return T.BOOL
        if op in ("eq", "ne"):
            need(tys[0] == tys[1] and T.is_first_order(tys[0]), f"operands {tys[0]}, {tys[1]}")
            return T.BOOL
        if op in ("and", "or"):
            need(tys[0] == T.BOOL and tys[1] == T.BOOL, "operands must be Bool")
            return T.BOOL
        if op == "not":
            need(tys[0] == T.BOOL, "operand must be Bool")
            return T.BOOL
        if op == "torat":
            need(tys[0] == T.INT, f"operand {tys[0]}")
            return T.RAT
        self.fail(path, f"unknown primitive {op}")


def is_closed(t: Term, depth: int = 0) -> bool:
    if isinstance(t, Var):
        return t.index < depth
    return all(is_closed(k, depth + b) for k, b in zip(kids(t), binders(t)))
