"""Structural operations on de Bruijn terms."""
from __future__ import annotations

from fractions import Fraction

from .. import types as T
from ..values import InlV, InrV
from .check import typecheck_term
from .terms import (
    App, ArrLit, Case, Fst, If, Inl, Inr, Lam, Lit, Pair, Prim, Probe, Snd, Term,
    UnitLit, Var, binders, kids, with_kids,
)


def shift(t: Term, d: int, cutoff: int = 0) -> Term:
    """Add ``d`` to every variable index >= ``cutoff``."""
    if d == 0:
        return t
    if isinstance(t, Var):
        if t.index >= cutoff:
            if t.index + d < 0:
                raise ValueError("shift would produce a negative index")
            return Var(t.index + d, t.name)
        return t
    ks = kids(t)
    if not ks:
        return t
    return with_kids(t, tuple(shift(k, d, cutoff + b) for k, b in zip(ks, binders(t))))


def substitute(t: Term, idx: int, s: Term) -> Term:
    """Replace variable ``idx`` in ``t`` by ``s`` (capture-avoiding)."""
    if isinstance(t, Var):
        return s if t.index == idx else t
    ks = kids(t)
    if not ks:
        return t
    return with_kids(t, tuple(
        substitute(k, idx + b, shift(s, b)) if b else substitute(k, idx, s)
        for k, b in zip(ks, binders(t))
    ))


def instantiate(body: Term, arg: Term) -> Term:
    """Beta-reduce ``(λ. body) arg``."""
    return shift(substitute(body, 0, shift(arg, 1)), -1)


def alpha_equal(a: Term, b: Term) -> bool:
    # display names are excluded from equality, so this is structural
    return a == b


def occurrences(t: Term, idx: int = 0) -> int:
    if isinstance(t, Var):
        return 1 if t.index == idx else 0
    return sum(occurrences(k, idx + b) for k, b in zip(kids(t), binders(t)))


def mentions(t: Term, idx: int) -> bool:
    return occurrences(t, idx) > 0


def free_indices(t: Term, depth: int = 0) -> set:
    """Indices of free variables of ``t`` (relative to its own root)."""
    if isinstance(t, Var):
        return {t.index - depth} if t.index >= depth else set()
    out: set = set()
    for k, b in zip(kids(t), binders(t)):
        out |= free_indices(k, depth + b)
    return out


def strengthen(t: Term, count: int) -> Term | None:
    """Drop the ``count`` innermost binders from ``t``'s scope, or None if it uses them."""
    if any(i < count for i in free_indices(t)):
        return None
    return shift(t, -count)


# -- positions ------------------------------------------------------------

def subterm_at(t: Term, path) -> Term:
    for i in path:
        t = kids(t)[i]
    return t


def replace_at(t: Term, path, new: Term) -> Term:
    if not path:
        return new
    ks = list(kids(t))
    ks[path[0]] = replace_at(ks[path[0]], path[1:], new)
    return with_kids(t, tuple(ks))


def positions(t: Term, path=(), depth=0):
    """Pre-order (outermost first, leftmost first) ``(path, subterm, depth)``."""
    yield path, t, depth
    for i, (k, b) in enumerate(zip(kids(t), binders(t))):
        yield from positions(k, path + (i,), depth + b)


def context_types(t: Term, path) -> tuple:
    """Binder types in scope at ``path`` (innermost first)."""
    ctx: tuple = ()
    node = t
    for i in path:
        if isinstance(node, Lam):
            ctx = (node.ty,) + ctx
        elif isinstance(node, Case) and i > 0:
            s = typecheck_term(node.scrut, ctx)
            ctx = ((s.left if i == 1 else s.right),) + ctx
        node = kids(node)[i]
    return ctx


def context_names(t: Term, path) -> tuple:
    """Display names of the binders in scope at ``path`` (innermost first)."""
    names: tuple = ()
    node = t
    for i in path:
        if isinstance(node, Lam):
            names = (node.name or "_",) + names
        elif isinstance(node, Case) and i > 0:
            names = ((node.left_name if i == 1 else node.right_name) or "_",) + names
        node = kids(node)[i]
    return names


# -- let normalization ----------------------------------------------------

def _unconditional_uses(t: Term, idx: int) -> int | None:
    """Occurrences of ``idx`` in ``t``, or None if one sits in a deferred position.

    Deferred means evaluated zero or many times: under a lambda, in a
    branch, or in the right operand of a short-circuit operator.
    """
    if isinstance(t, Var):
        return 1 if t.index == idx else 0
    total = 0
    ks = kids(t)
    for pos, (k, b) in enumerate(zip(ks, binders(t))):
        deferred = (
            isinstance(t, (Lam, Case)) and b
            or isinstance(t, If) and pos > 0
            or isinstance(t, Prim) and t.op in ("and", "or") and pos == 1
        )
        if deferred:
            if occurrences(k, idx + b):
                return None
            continue
        n = _unconditional_uses(k, idx + b)
        if n is None:
            return None
        total += n
    return total


# primitives that cannot fail on well-typed arguments
_TOTAL_PRIMS = frozenset({"add", "sub", "mul", "neg", "lt", "le", "gt", "ge", "eq", "ne",
                          "and", "or", "not", "torat", "length", "concat", "group", "range"})


def _total_prim(t: Prim) -> bool:
    if t.op == "replicate":  # only a negative count fails
        n = t.args[0]
        return isinstance(n, Prim) and n.op == "length" or isinstance(n, Lit) and n.value >= 0
    return t.op in _TOTAL_PRIMS


def may_fail(t: Term) -> bool:
    """Conservatively, whether evaluating ``t`` could fail or diverge."""
    if isinstance(t, (App, Probe)):
        return True
    if isinstance(t, Lam):
        return False
    if isinstance(t, Prim) and not _total_prim(t):
        return True
    return any(may_fail(k) for k in kids(t))


def _reached_first(t: Term, idx: int) -> bool | None:
    """True if ``idx`` is evaluated before anything that may fail.

    False if something that may fail comes first (or the use is deferred),
    None if ``t`` neither uses ``idx`` nor can fail.
    """
    if isinstance(t, Var):
        return True if t.index == idx else None
    if isinstance(t, Lam):
        return None
    if isinstance(t, App) and isinstance(t.fn, Lam):
        r = _reached_first(t.arg, idx)
        return r if r is not None else _reached_first(t.fn.body, idx + 1)
    if isinstance(t, Prim) and t.op in ("and", "or"):
        r = _reached_first(t.args[0], idx)
        return r if r is not None else False
    if isinstance(t, (If, Case)):
        r = _reached_first(kids(t)[0], idx)
        return r if r is not None else False
    if isinstance(t, Probe):
        return False
    for k in kids(t):
        r = _reached_first(k, idx)
        if r is not None:
            return r
    if isinstance(t, App) or isinstance(t, Prim) and not _total_prim(t):
        return False
    return None


def _inlinable(let_term: App) -> bool:
    body = let_term.fn.body
    if _unconditional_uses(body, 0) != 1:
        return False
    # moving a value that may fail past other failures would change outcomes
    return not may_fail(let_term.arg) or _reached_first(body, 0) is True


def _inline_pass(t: Term) -> Term:
    ks = kids(t)
    if ks:
        new = tuple(_inline_pass(k) for k in ks)
        if new != ks:
            t = with_kids(t, new)
    if isinstance(t, App) and isinstance(t.fn, Lam) and _inlinable(t):
        return instantiate(t.fn.body, t.arg)
    return t


def normalize(t: Term) -> Term:
    """Inline every let whose variable is used exactly once, unconditionally.

    A value that may fail is only inlined when its use is reached before
    anything else that may fail, so outcomes (including which error occurs)
    are preserved.

    The result is a canonical form for comparing translations of programs
    that differ only in how intermediate values are named.
    """
    while True:
        nxt = _inline_pass(t)
        if nxt == t:
            return nxt
        t = nxt


# -- synonyms -------------------------------------------------------------

def expand_synonyms(t: Term, ctx: tuple = ()) -> Term:
    """Rewrite ``flatMap`` and ``reduceByKey`` into core primitives."""
    if isinstance(t, Prim) and t.op == "flatMap":
        f, xss = (expand_synonyms(a, ctx) for a in t.args)
        return Prim("concat", (Prim("map", (f, xss)),))
    if isinstance(t, Prim) and t.op == "reduceByKey":
        f, init, xs = (expand_synonyms(a, ctx) for a in t.args)
        kv = typecheck_term(xs, ctx).elem
        group_ty = T.Prod(kv.left, T.Arr(kv.right))
        body = Pair(Fst(Var(0, "p")), Prim("fold", (shift(f, 1), shift(init, 1), Snd(Var(0, "p")))))
        return Prim("map", (Lam(group_ty, body, "p"), Prim("group", (xs,))))
    ks = kids(t)
    if not ks:
        return t
    if isinstance(t, Case):
        s = typecheck_term(t.scrut, ctx)
        return with_kids(t, (
            expand_synonyms(t.scrut, ctx),
            expand_synonyms(t.left, (s.left,) + ctx),
            expand_synonyms(t.right, (s.right,) + ctx),
        ))
    inner = (t.ty,) + ctx if isinstance(t, Lam) else ctx
    return with_kids(t, tuple(expand_synonyms(k, inner) for k in ks))


def has_synonyms(t: Term) -> bool:
    if isinstance(t, Prim) and t.op in ("flatMap", "reduceByKey"):
        return True
    return any(has_synonyms(k) for k in kids(t))


# -- values as terms ------------------------------------------------------

def quote(v, ty: T.Type) -> Term:
    """A closed term that evaluates to the first-order value ``v``."""
    if isinstance(ty, (T.IntT, T.BoolT)):
        return Lit(v, ty)
    if isinstance(ty, T.RatT):
        return Lit(Fraction(v), ty)
    if isinstance(ty, T.UnitT):
        return UnitLit()
    if isinstance(ty, T.Arr):
        return ArrLit(tuple(quote(x, ty.elem) for x in v), ty.elem)
    if isinstance(ty, T.Prod):
        return Pair(quote(v.fst, ty.left), quote(v.snd, ty.right))
    if isinstance(ty, T.Sum):
        if isinstance(v, InlV):
            return Inl(quote(v.value, ty.left), ty.right)
        if isinstance(v, InrV):
            return Inr(quote(v.value, ty.right), ty.left)
    raise TypeError(f"cannot quote a value of type {ty}")


def apply_args(t: Term, args) -> Term:
    for a in args:
        t = App(t, a)
    return t

