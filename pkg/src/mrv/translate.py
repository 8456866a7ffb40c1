"""IL to FFL translation.

Statements are translated in continuation-passing style: every declaration
or assignment becomes a let (``(λx. rest) value``), ``for`` becomes ``fold``
and ``while`` becomes ``iter``. A loop only threads its *write set* through
the state: variables declared before the loop and assigned inside it, in
declaration order. The state is ``Unit`` for an empty write set, the bare
variable for one, and right-nested pairs otherwise. Parameters and
loop-local declarations never enter a state.

``translate`` returns the let-normalized term (single-use lets inlined, see
:func:`mrv.ffl.ops.normalize`); ``translate_raw`` returns the direct image.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import types as T
from .ffl.evaluate import run_function
from .ffl.ops import normalize, shift
from .ffl.terms import (
    App, ArrLit, Fst, If, Inl, Inr, Lam, Lit, Pair, Prim, Snd, Term, UnitLit, Var,
)
from .il.interp import interpret_il
from .il.syntax import (
    ArrayLit, Assign, BinOp, BoolLit, Call, For, Index, IndexAssign, IntLit,
    Lambda, Name, PairExpr, RatLit, Return, UnOp, VarDecl, While,
    assigned_names,
)
from .il.typecheck import TypedProgram
from .values import DEFAULT_BUDGET, same_outcome

_BINOP = {"+": "add", "-": "sub", "*": "mul", "/": "div", "<": "lt", "<=": "le",
          ">": "gt", ">=": "ge", "=": "eq", "!=": "ne", "&&": "and", "||": "or"}
_DIRECT = ("length", "replicate", "range", "zip", "concat", "group")


@dataclass(frozen=True)
class Binding:
    term: Term  # valid at ``depth``
    depth: int
    type: T.Type


Env = dict  # name -> Binding, insertion order = declaration order
Cont = Callable[[Env, int], Term]


def state_type(tys) -> T.Type:
    tys = list(tys)
    if not tys:
        return T.UNIT
    out = tys[-1]
    for ty in reversed(tys[:-1]):
        out = T.Prod(ty, out)
    return out


def state_tuple(terms) -> Term:
    terms = list(terms)
    if not terms:
        return UnitLit()
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Pair(t, out)
    return out


def projections(state: Term, n: int) -> list:
    """Terms selecting each of ``n`` components from a state laid out as above."""
    if n == 0:
        return []
    if n == 1:
        return [state]
    out = []
    for _ in range(n - 1):
        out.append(Fst(state))
        state = Snd(state)
    out.append(state)
    return out


class Translator:
    def __init__(self, tp: TypedProgram):
        self.tp = tp
        self.types = tp.types
        self.coerce = tp.coerce

    # -- environment ------------------------------------------------------
    @staticmethod
    def lookup(env: Env, name: str, d: int) -> Term:
        b = env[name]
        return shift(b.term, d - b.depth)

    @staticmethod
    def bind(env: Env, name: str, term: Term, d: int, ty) -> Env:
        out = dict(env)
        out[name] = Binding(term, d, ty)
        return out

    def let(self, env: Env, d: int, name: str, ty, value: Term, rest: Cont) -> Term:
        inner = self.bind(env, name, Var(0, name), d + 1, ty)
        return App(Lam(ty, rest(inner, d + 1), name), value)

    # -- program ----------------------------------------------------------
    def program(self) -> Term:
        p = self.tp.program
        env: Env = {}
        for i, q in enumerate(p.params):
            env[q.name] = Binding(Var(0, q.name), i + 1, q.type)
        body = self.stmts(p.body, env, len(p.params), self._no_return)
        for q in reversed(p.params):
            body = Lam(q.type, body, q.name)
        return body

    @staticmethod
    def _no_return(env, d):
        raise ValueError("function body ends without a return statement")

    def stmts(self, stmts, env: Env, d: int, k: Cont) -> Term:
        if not stmts:
            return k(env, d)
        s, rest = stmts[0], stmts[1:]

        def then(env2, d2):
            return self.stmts(rest, env2, d2, k)

        return self.stmt(s, env, d, then)

    def stmt(self, s, env: Env, d: int, k: Cont) -> Term:
        if isinstance(s, Return):
            return self.expr(s.value, env, d)
        if isinstance(s, VarDecl):
            ty = s.type if s.type is not None else self.types[id(s.init)]
            return self.let(env, d, s.name, ty, self.expr(s.init, env, d), k)
        if isinstance(s, Assign):
            ty = env[s.name].type
            return self.let(env, d, s.name, ty, self.expr(s.value, env, d), k)
        if isinstance(s, IndexAssign):
            ty = env[s.name].type
            value = Prim("update", (self.lookup(env, s.name, d),
                                    self.expr(s.index, env, d),
                                    self.expr(s.value, env, d)))
            return self.let(env, d, s.name, ty, value, k)
        if isinstance(s, (For, While)):
            return self.loop(s, env, d, k)
        raise TypeError(f"cannot translate {type(s).__name__}")

    def write_set(self, body, env: Env) -> list:
        assigned = set(assigned_names(body))
        return [n for n in env if n in assigned]

    def loop(self, s, env: Env, d: int, k: Cont) -> Term:
        ws = self.write_set(s.body, env)
        tys = [env[n].type for n in ws]
        sty = state_type(tys)
        init = state_tuple(self.lookup(env, n, d) for n in ws)

        def pack(env2, d2):
            return state_tuple(self.lookup(env2, n, d2) for n in ws)

        def unpack(base: Env, state_depth: int) -> Env:
            # the state is Var(0) at ``state_depth``
            out = dict(base)
            for n, proj, ty in zip(ws, projections(Var(0, "acc"), len(ws)), tys):
                out[n] = Binding(proj, state_depth, ty)
            return out

        if isinstance(s, For):
            xs = self.expr(s.iterable, env, d)
            elem = self.types[id(s.iterable)].elem
            inner = unpack(env, d + 1)
            inner[s.var] = Binding(Var(0, s.var), d + 2, elem)
            body = self.stmts(s.body, inner, d + 2, pack)
            loop_term = Prim("fold", (Lam(sty, Lam(elem, body, s.var), "acc"), init, xs))
        else:
            inner = unpack(env, d + 1)
            cond = self.expr(s.cond, inner, d + 1)
            body = self.stmts(s.body, inner, d + 1, pack)
            step = Lam(sty, If(cond, Inr(body, sty), Inl(Var(0, "acc"), sty)), "acc")
            loop_term = App(Prim("iter", (step,)), init)

        rest = k(unpack(env, d + 1), d + 1)
        name = ws[0] if len(ws) == 1 else "state"
        return App(Lam(sty, rest, name), loop_term)

    # -- expressions ------------------------------------------------------
    def expr(self, e, env: Env, d: int) -> Term:
        t = self._expr(e, env, d)
        if id(e) in self.coerce:
            return Prim("torat", (t,))
        return t

    def _expr(self, e, env: Env, d: int) -> Term:
        if isinstance(e, Name):
            return self.lookup(env, e.name, d)
        if isinstance(e, IntLit):
            if self.types.get(id(e)) == T.RAT:
                return Lit(Fraction(e.value), T.RAT)
            return Lit(e.value, T.INT)
        if isinstance(e, RatLit):
            return Lit(e.value, T.RAT)
        if isinstance(e, BoolLit):
            return Lit(e.value, T.BOOL)
        if isinstance(e, BinOp):
            return Prim(_BINOP[e.op], (self.expr(e.left, env, d), self.expr(e.right, env, d)))
        if isinstance(e, UnOp):
            return Prim("not" if e.op == "!" else "neg", (self.expr(e.operand, env, d),))
        if isinstance(e, Index):
            return Prim("index", (self.expr(e.array, env, d), self.expr(e.index, env, d)))
        if isinstance(e, PairExpr):
            return Pair(self.expr(e.left, env, d), self.expr(e.right, env, d))
        if isinstance(e, ArrayLit):
            elem = self.types[id(e)].elem
            return ArrLit(tuple(self.expr(x, env, d) for x in e.items), elem)
        if isinstance(e, Call):
            return self.call(e, env, d)
        raise TypeError(f"cannot translate {type(e).__name__}")

    def call(self, e: Call, env: Env, d: int) -> Term:
        f, args = e.func, e.args
        if f == "fst":
            return Fst(self.expr(args[0], env, d))
        if f == "snd":
            return Snd(self.expr(args[0], env, d))
        if f in _DIRECT:
            return Prim(f, tuple(self.expr(a, env, d) for a in args))
        if f in ("map", "flatMap"):
            return Prim(f, (self.unary_lambda(args[0], env, d), self.expr(args[1], env, d)))
        if f in ("fold", "reduceByKey"):
            return Prim(f, (self.curried_lambda(args[0], env, d),
                            self.expr(args[1], env, d), self.expr(args[2], env, d)))
        raise TypeError(f"unknown builtin {f}")

    def unary_lambda(self, lam: Lambda, env: Env, d: int) -> Term:
        if len(lam.params) == 1:
            (p,) = lam.params
            inner = self.bind(env, p.name, Var(0, p.name), d + 1, p.type)
            return Lam(p.type, self.expr(lam.body, inner, d + 1), p.name)
        # (x : X) (y : Y) => body over a pair argument
        x, y = lam.params
        pty = T.Prod(x.type, y.type)
        arg = Var(0, f"{x.name}_{y.name}")
        inner = self.bind(env, x.name, Fst(arg), d + 1, x.type)
        inner = self.bind(inner, y.name, Snd(arg), d + 1, y.type)
        return Lam(pty, self.expr(lam.body, inner, d + 1), arg.name)

    def curried_lambda(self, lam: Lambda, env: Env, d: int) -> Term:
        a, b = lam.params
        inner = self.bind(env, a.name, Var(1, a.name), d + 2, a.type)
        inner = self.bind(inner, b.name, Var(0, b.name), d + 2, b.type)
        return Lam(a.type, Lam(b.type, self.expr(lam.body, inner, d + 2), b.name), a.name)


def translate_raw(tp: TypedProgram) -> Term:
    return Translator(tp).program()


def translate(tp: TypedProgram) -> Term:
    """Closed FFL function over the parameters of ``tp``, let-normalized."""
    return normalize(translate_raw(tp))


@dataclass(frozen=True)
class Agree:
    outcome: object


@dataclass(frozen=True)
class Disagree:
    ffl: object
    il: object

    @property
    def details(self) -> str:
        return f"FFL gave {self.ffl}, IL interpreter gave {self.il}"


def translation_oracle_check(tp: TypedProgram, args, budget: int = DEFAULT_BUDGET, term: Term | None = None):
    """Compare eval of the translation with the IL interpreter on ``args``."""
    term = translate(tp) if term is None else term
    ffl = run_function(term, args, budget)
    il = interpret_il(tp, args, budget)
    return Agree(ffl) if same_outcome(ffl, il) else Disagree(ffl, il)
