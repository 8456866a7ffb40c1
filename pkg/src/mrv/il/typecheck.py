"""Bidirectional type checker for IL.

Integer literals are polymorphic: checked against ``Rat`` they become
rational literals. Any other ``Int`` expression used where ``Rat`` is needed
is recorded in ``coerce`` and promoted at run time. ``/`` always produces
``Rat``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .. import types as T
from .syntax import (
    ArrayLit, Assign, BinOp, BoolLit, Call, Expr, Forall, For, Index,
    IndexAssign, IntLit, Lambda, Name, PairExpr, Program, RatLit, Return,
    Span, UnOp, VarDecl, While,
)


@dataclass(frozen=True)
class TypeCheckError:
    span: Optional[Span]
    message: str
    expected: Optional[T.Type] = None
    actual: Optional[T.Type] = None

    def render(self, filename: Optional[str] = None) -> str:
        where = f"{self.span.line}:{self.span.col}" if self.span else "?:?"
        prefix = f"{filename}:" if filename else ""
        return f"{prefix}{where}: {self.message}"


class TypeErrors(Exception):
    """All type errors found in one program (never just the first)."""

    def __init__(self, errors, filename: Optional[str] = None):
        self.errors = list(errors)
        self.filename = filename
        super().__init__("\n".join(e.render(filename) for e in self.errors))


@dataclass
class TypedProgram:
    program: Program
    types: dict  # id(expr) -> Type
    coerce: frozenset  # ids of Int expressions promoted to Rat
    locals: tuple  # (name, type) for every local, in declaration order
    scopes: dict  # id(stmt) -> names in scope just before stmt
    ret_type: T.Type
    filename: Optional[str] = None

    def type_of(self, e: Expr) -> T.Type:
        return self.types[id(e)]

    @property
    def name(self) -> str:
        return self.program.name

    @property
    def params(self) -> list:
        return [(p.name, p.type) for p in self.program.params]

    @property
    def signature(self):
        return tuple(p.type for p in self.program.params), self.ret_type


@dataclass
class ExprTyping:
    """Typing facts for a free-standing expression (e.g. a coupling predicate)."""

    expr: Expr
    type: T.Type
    types: dict
    coerce: frozenset


@dataclass
class _Var:
    type: T.Type
    kind: str  # param | local | loop | lambda | bound


ARITH = ("+", "-", "*")
ORDER = ("<", "<=", ">", ">=")


class _Checker:
    def __init__(self, allow_forall: bool = False):
        self.errors: list = []
        self.types: dict = {}
        self.coerce: set = set()
        self.locals: list = []
        self.scopes: dict = {}
        self.allow_forall = allow_forall

    def err(self, span, message, expected=None, actual=None):
        self.errors.append(TypeCheckError(span, message, expected, actual))
        return None

    def note(self, e, ty):
        if ty is not None:
            self.types[id(e)] = ty
        return ty

    # -- statements -------------------------------------------------------
    def program(self, p: Program) -> Optional[T.Type]:
        env: dict = {}
        for q in p.params:
            if q.name in env:
                self.err(q.span, f"duplicate parameter {q.name!r}")
            if not T.is_first_order(q.type):
                self.err(q.span, f"parameter {q.name!r} has a function type")
            env[q.name] = _Var(q.type, "param")
        if p.ret is not None and not T.is_first_order(p.ret):
            self.err(p.span, "return type must be first-order")
        if not p.body or not isinstance(p.body[-1], Return):
            self.err(p.span, "function body must end with a return statement")
        ret = self.block(p.body, env, top=True, declared_ret=p.ret)
        return p.ret if p.ret is not None else ret

    def block(self, stmts, env: dict, top=False, declared_ret=None):
        env = dict(env)
        ret = None
        for i, s in enumerate(stmts):
            self.scopes[id(s)] = tuple(env)
            if isinstance(s, Return):
                if not top or i != len(stmts) - 1:
                    self.err(s.span, "return must be the last statement of the function body")
                if declared_ret is not None:
                    self.check(s.value, declared_ret, env)
                    ret = declared_ret
                else:
                    ret = self.infer(s.value, env)
                    if ret is not None and not T.is_first_order(ret):
                        self.err(s.span, "return value must be first-order")
            elif isinstance(s, VarDecl):
                if s.name in env:
                    self.err(s.span, f"declaration of {s.name!r} shadows an existing variable")
                if s.type is not None:
                    if not T.is_first_order(s.type):
                        self.err(s.span, "local variables cannot hold functions")
                    self.check(s.init, s.type, env)
                    ty = s.type
                else:
                    ty = self.infer(s.init, env)
                if ty is not None:
                    env[s.name] = _Var(ty, "local")
                    self.locals.append((s.name, ty))
                else:
                    env[s.name] = _Var(None, "local")
            elif isinstance(s, (Assign, IndexAssign)):
                var = env.get(s.name)
                if var is None:
                    self.err(s.span, f"assignment to undeclared variable {s.name!r}")
                    continue
                if var.kind == "param":
                    self.err(s.span, f"parameter {s.name!r} is read-only")
                elif var.kind == "loop":
                    self.err(s.span, f"loop variable {s.name!r} cannot be assigned inside its loop")
                if var.type is None:
                    continue
                if isinstance(s, Assign):
                    self.check(s.value, var.type, env)
                elif not isinstance(var.type, T.Arr):
                    self.err(s.span, f"{s.name!r} is not an array", actual=var.type)
                else:
                    self.check(s.index, T.INT, env)
                    self.check(s.value, var.type.elem, env)
            elif isinstance(s, For):
                it = self.infer(s.iterable, env)
                if s.var in env:
                    self.err(s.span, f"loop variable {s.var!r} shadows an existing variable")
                inner = dict(env)
                if it is not None and not isinstance(it, T.Arr):
                    self.err(s.iterable.span, f"for loop over non-array {it}", actual=it)
                    it = None
                inner[s.var] = _Var(it.elem if it is not None else None, "loop")
                self.block(s.body, inner)
            elif isinstance(s, While):
                self.check(s.cond, T.BOOL, env)
                self.block(s.body, env)
            else:
                self.err(getattr(s, "span", None), f"unknown statement {type(s).__name__}")
        return ret

    # -- expressions ------------------------------------------------------
    def promote(self, e):
        if isinstance(e, IntLit):
            self.types[id(e)] = T.RAT
        else:
            self.coerce.add(id(e))

    def check(self, e, expected: T.Type, env) -> Optional[T.Type]:
        if isinstance(e, IntLit) and expected == T.RAT:
            return self.note(e, T.RAT)
        ty = self.infer(e, env, hint=expected)
        if ty is None:
            return None
        if ty == expected:
            return ty
        if ty == T.INT and expected == T.RAT:
            self.promote(e)
            return T.RAT
        return self.err(e.span, f"{ty} where {expected} expected", expected, ty)

    def numeric(self, e, env):
        ty = self.infer(e, env)
        if ty is not None and ty not in T.NUMERIC:
            return self.err(e.span, f"{ty} where Int or Rat expected", None, ty)
        return ty

    def infer(self, e, env, hint=None) -> Optional[T.Type]:
        return self.note(e, self._infer(e, env, hint))

    def _infer(self, e, env, hint):
        if isinstance(e, IntLit):
            return T.INT
        if isinstance(e, RatLit):
            return T.RAT
        if isinstance(e, BoolLit):
            return T.BOOL
        if isinstance(e, Name):
            var = env.get(e.name)
            if var is None:
                return self.err(e.span, f"unknown variable {e.name!r}")
            return var.type
        if isinstance(e, BinOp):
            return self._binop(e, env)
        if isinstance(e, UnOp):
            if e.op == "!":
                return self.check(e.operand, T.BOOL, env) and T.BOOL
            return self.numeric(e.operand, env)
        if isinstance(e, Index):
            at = self.infer(e.array, env)
            self.check(e.index, T.INT, env)
            if at is None:
                return None
            if not isinstance(at, T.Arr):
                return self.err(e.array.span, f"indexing a non-array {at}", actual=at)
            return at.elem
        if isinstance(e, PairExpr):
            if isinstance(hint, T.Prod):
                lt = self.check(e.left, hint.left, env)
                rt = self.check(e.right, hint.right, env)
            else:
                lt, rt = self.infer(e.left, env), self.infer(e.right, env)
            return T.Prod(lt, rt) if lt is not None and rt is not None else None
        if isinstance(e, ArrayLit):
            elem = hint.elem if isinstance(hint, T.Arr) else None
            if elem is None:
                if not e.items:
                    return self.err(e.span, "cannot infer the element type of an empty array")
                elem = self.infer(e.items[0], env)
                rest = e.items[1:]
            else:
                rest = e.items
            ok = elem is not None
            for item in rest:
                ok = self.check(item, elem, env) is not None and ok if elem is not None else False
            return T.Arr(elem) if ok else None
        if isinstance(e, Lambda):
            return self.err(e.span, "lambdas may only appear as builtin arguments")
        if isinstance(e, Call):
            return self._call(e, env, hint)
        if isinstance(e, Forall):
            if not self.allow_forall:
                return self.err(e.span, "forall is only allowed in coupling predicates")
            inner = dict(env)
            for name, arr in e.bounds:
                at = self.infer(arr, inner)
                if at is not None and not isinstance(at, T.Arr):
                    self.err(arr.span, f"forall ranges over a non-array {at}", actual=at)
                inner[name] = _Var(T.INT, "bound")
            return self.check(e.body, T.BOOL, inner) and T.BOOL
        return self.err(getattr(e, "span", None), f"unknown expression {type(e).__name__}")

    def _binop(self, e: BinOp, env):
        op = e.op
        if op in ("&&", "||"):
            lt = self.check(e.left, T.BOOL, env)
            rt = self.check(e.right, T.BOOL, env)
            return T.BOOL if lt and rt else None
        if op in ARITH or op in ORDER or op == "/":
            lt, rt = self.numeric(e.left, env), self.numeric(e.right, env)
            if lt is None or rt is None:
                return None
            if op == "/":
                for side, ty in ((e.left, lt), (e.right, rt)):
                    if ty == T.INT:
                        self.promote(side)
                return T.RAT
            if lt != rt:
                self.promote(e.left if lt == T.INT else e.right)
            result = T.RAT if T.RAT in (lt, rt) else T.INT
            return T.BOOL if op in ORDER else result
        if op in ("=", "!="):
            lt, rt = self.infer(e.left, env), self.infer(e.right, env)
            if lt is None or rt is None:
                return None
            if lt in T.NUMERIC and rt in T.NUMERIC and lt != rt:
                self.promote(e.left if lt == T.INT else e.right)
            elif lt != rt:
                return self.err(e.span, f"comparing {lt} with {rt}", lt, rt)
            if not T.is_first_order(lt):
                return self.err(e.span, "cannot compare functions")
            return T.BOOL
        return self.err(e.span, f"unknown operator {op!r}")

    # -- builtins ---------------------------------------------------------
    def _arity(self, e: Call, n: int) -> bool:
        if len(e.args) != n:
            self.err(e.span, f"{e.func} expects {n} argument(s), got {len(e.args)}")
            return False
        return True

    def _array(self, arg, env, what="array"):
        ty = self.infer(arg, env)
        if ty is not None and not isinstance(ty, T.Arr):
            return self.err(arg.span, f"{ty} where {what} expected", actual=ty)
        return ty

    def _lambda(self, lam, param_types, env, body_hint=None, destructure=False):
        """Type a lambda argument; returns its body type or None."""
        if not isinstance(lam, Lambda):
            return self.err(getattr(lam, "span", None), "expected a lambda argument")
        if destructure and len(lam.params) == 2 and len(param_types) == 1:
            elem = param_types[0]
            if not isinstance(elem, T.Prod):
                return self.err(lam.span, f"two-parameter lambda applied to non-pair {elem}", actual=elem)
            param_types = [elem.left, elem.right]
        if len(lam.params) != len(param_types):
            return self.err(lam.span, f"lambda takes {len(lam.params)} parameter(s), {len(param_types)} expected")
        inner = dict(env)
        for p, want in zip(lam.params, param_types):
            if want is not None and p.type != want:
                self.err(p.span, f"parameter {p.name!r} is {p.type} but {want} expected", want, p.type)
            inner[p.name] = _Var(p.type, "lambda")
        body = self.check(lam.body, body_hint, inner) if body_hint is not None else self.infer(lam.body, inner)
        if body is not None:
            self.note(lam, T.Fun(tuple(p.type for p in lam.params), body))
        return body

    def _call(self, e: Call, env, hint):
        f, args = e.func, e.args
        elem_hint = hint.elem if isinstance(hint, T.Arr) else None
        if f == "length":
            if self._arity(e, 1) and self._array(args[0], env) is not None:
                return T.INT
            return None
        if f == "replicate":
            if not self._arity(e, 2):
                return None
            self.check(args[0], T.INT, env)
            x = self.check(args[1], elem_hint, env) if elem_hint is not None else self.infer(args[1], env)
            return T.Arr(x) if x is not None else None
        if f == "range":
            if not self._arity(e, 2):
                return None
            a, b = self.check(args[0], T.INT, env), self.check(args[1], T.INT, env)
            return T.Arr(T.INT) if a and b else None
        if f == "zip":
            if not self._arity(e, 2):
                return None
            a, b = self._array(args[0], env), self._array(args[1], env)
            return T.Arr(T.Prod(a.elem, b.elem)) if a is not None and b is not None else None
        if f in ("fst", "snd"):
            if not self._arity(e, 1):
                return None
            p = self.infer(args[0], env)
            if p is None:
                return None
            if not isinstance(p, T.Prod):
                return self.err(args[0].span, f"{f} of non-pair {p}", actual=p)
            return p.left if f == "fst" else p.right
        if f == "concat":
            if not self._arity(e, 1):
                return None
            a = self._array(args[0], env)
            if a is None:
                return None
            if not isinstance(a.elem, T.Arr):
                return self.err(args[0].span, f"concat of {a}, expected an array of arrays", actual=a)
            return a.elem
        if f == "group":
            if not self._arity(e, 1):
                return None
            a = self._array(args[0], env)
            if a is None:
                return None
            if not isinstance(a.elem, T.Prod):
                return self.err(args[0].span, f"group expects key-value pairs, got {a}", actual=a)
            return T.Arr(T.Prod(a.elem.left, T.Arr(a.elem.right)))
        if f in ("map", "flatMap"):
            if not self._arity(e, 2):
                return None
            a = self._array(args[1], env)
            if a is None:
                return None
            body_hint = elem_hint if f == "map" else hint
            body = self._lambda(args[0], [a.elem], env, body_hint, destructure=True)
            if body is None:
                return None
            if f == "map":
                return T.Arr(body)
            if not isinstance(body, T.Arr):
                return self.err(args[0].span, f"flatMap function must return an array, got {body}", actual=body)
            return body
        if f == "fold":
            if not self._arity(e, 3):
                return None
            a = self._array(args[2], env)
            lam = args[0]
            if a is None or not isinstance(lam, Lambda) or len(lam.params) != 2:
                if isinstance(lam, Lambda) and len(lam.params) != 2:
                    self.err(lam.span, "fold expects a two-parameter lambda")
                elif not isinstance(lam, Lambda):
                    self.err(getattr(lam, "span", None), "expected a lambda argument")
                return None
            acc_ty = lam.params[0].type
            self.check(args[1], acc_ty, env)
            body = self._lambda(lam, [acc_ty, a.elem], env, body_hint=acc_ty)
            return acc_ty if body is not None else None
        if f == "reduceByKey":
            if not self._arity(e, 3):
                return None
            a = self._array(args[2], env)
            if a is None:
                return None
            if not isinstance(a.elem, T.Prod):
                return self.err(args[2].span, f"reduceByKey expects key-value pairs, got {a}", actual=a)
            v = a.elem.right
            self.check(args[1], v, env)
            body = self._lambda(args[0], [v, v], env, body_hint=v)
            return a if body is not None else None
        return self.err(e.span, f"unknown function {f!r}")


def typecheck_program(p: Program, filename: Optional[str] = None) -> TypedProgram:
    """Type-check ``p``; raises :class:`TypeErrors` listing every error."""
    c = _Checker()
    ret = c.program(p)
    if c.errors:
        raise TypeErrors(c.errors, filename)
    return TypedProgram(p, c.types, frozenset(c.coerce), tuple(c.locals), c.scopes, ret, filename)


def typecheck_expr(e: Expr, env_types: dict, expected: Optional[T.Type] = None,
                   allow_forall: bool = True) -> ExprTyping:
    """Type a free-standing expression against ``env_types`` (name -> type)."""
    c = _Checker(allow_forall=allow_forall)
    env = {name: _Var(ty, "param") for name, ty in env_types.items()}
    ty = c.check(e, expected, env) if expected is not None else c.infer(e, env)
    if c.errors:
        raise TypeErrors(c.errors)
    return ExprTyping(e, ty, c.types, frozenset(c.coerce))


def load_program(source: str, filename: Optional[str] = None) -> TypedProgram:
    """Parse and type-check in one go."""
    from .parser import parse_program

    return typecheck_program(parse_program(source, filename), filename)
