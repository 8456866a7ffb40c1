"""The rule catalog.

Each rule matches one FFL subterm (given the binder types in scope) and
either returns an instantiation of its metavariables or a :class:`NoMatch`
explaining which stage failed. ``build`` turns an instantiation into the
right-hand side; ``obligations`` lists semantic side conditions as Bool
terms valid at the matched position.

Terms written in the comments use ``acc``/``i``/``x`` for the lambda
binders of the matched fold, innermost last.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .. import types as T
from ..ffl.check import typecheck_term
from ..ffl.ops import mentions, occurrences, shift, strengthen
from ..ffl.terms import Fst, Lam, Lit, Pair, Prim, Snd, Term, Var, binders, kids, with_kids

SKELETON = "skeleton"
SIDE_CONDITION = "side-condition"


@dataclass(frozen=True)
class NoMatch:
    stage: str  # SKELETON or SIDE_CONDITION
    reason: str


@dataclass(frozen=True)
class Obligation:
    name: str
    description: str
    check: Term  # Bool, valid in the context of the matched position


@dataclass(frozen=True)
class Rule:
    name: str
    kind: str  # "structural" or "definitional"
    doc: str
    lhs: str
    rhs: str
    matcher: Callable = field(repr=False)
    builder: Callable = field(repr=False)
    obliger: Callable = field(repr=False, default=lambda inst: [])

    def match(self, term: Term, ctx: Callable[[], tuple]):
        """``ctx`` lazily yields the binder types in scope at ``term``."""
        return self.matcher(term, ctx)

    def build(self, inst: dict) -> Term:
        return self.builder(inst)

    def obligations(self, inst: dict) -> list:
        return self.obliger(inst)


# -- helpers ----------------------------------------------------------------

def _is_prim(t, op, arity=None):
    return isinstance(t, Prim) and t.op == op and (arity is None or len(t.args) == arity)


def _is_var(t, idx):
    return isinstance(t, Var) and t.index == idx


def _fold_parts(t):
    """``fold(λacc:S. λx:E. body, init, xs)`` -> (S, E, body, init, xs) or None."""
    if not _is_prim(t, "fold", 3):
        return None
    f, init, xs = t.args
    if not (isinstance(f, Lam) and isinstance(f.body, Lam)):
        return None
    return f.ty, f.body.ty, f.body.body, init, xs


def _zero_range(xs):
    """``range(0, n)`` -> n."""
    if _is_prim(xs, "range", 2) and xs.args[0] == Lit(0, T.INT):
        return xs.args[1]
    return None


class _Abstract:
    """Replace ``index(X, i)`` in a fold body by the element variable.

    Works in the body's own context where ``i`` is Var(0) and ``acc`` is
    Var(1). Every matched ``X`` must avoid both binders and all must agree;
    any other use of ``i`` is reported.
    """

    def __init__(self):
        self.array: Optional[Term] = None  # X relative to the body's context
        self.replaced = 0
        self.conflict = False

    def run(self, t: Term, b: int = 0) -> Term:
        if _is_prim(t, "index", 2) and _is_var(t.args[1], b):
            arr = strengthen(t.args[0], b) if b else t.args[0]
            if arr is not None and not mentions(arr, 0) and not mentions(arr, 1):
                if self.array is None:
                    self.array = arr
                if arr == self.array:
                    self.replaced += 1
                    return Var(b, "x")
                self.conflict = True
        ks = kids(t)
        if not ks:
            return t
        return with_kids(t, tuple(self.run(k, b + n) for k, n in zip(ks, binders(t))))


def _abstract_index(body: Term):
    ab = _Abstract()
    new = ab.run(body)
    if ab.array is None:
        return NoMatch(SIDE_CONDITION, "the loop index is never used to read an array element")
    if ab.conflict:
        return NoMatch(SIDE_CONDITION, "the loop index reads more than one array")
    if occurrences(body, 0) != ab.replaced:
        return NoMatch(SIDE_CONDITION, "the loop index is used other than to read the array element")
    return new, ab.array


def _drop_acc(t: Term) -> Optional[Term]:
    """Remove binder 1 (``acc``) from a body's context; None if it is used."""
    if mentions(t, 1):
        return None
    return shift(t, -1, cutoff=2)


def _length_obligations(xs: Term, others, what: str) -> list:
    out = []
    for label, other in others:
        if other == Prim("length", (xs,)):
            continue
        out.append(Obligation(
            f"length-{label}",
            f"{what} has the same length as {label}",
            Prim("eq", (Prim("length", (xs,)), other if label == "bound" else Prim("length", (other,)))),
        ))
    return out


# -- map-introduce ------------------------------------------------------------
# fold(λacc.λi. acc[i := B[xs[i]]], ys, range(0, n))  ~>  map(λx. B[x], xs)

def _map_introduce_match(t, ctx):
    parts = _fold_parts(t)
    if parts is None:
        return NoMatch(SKELETON, "not a fold with a two-argument lambda")
    _acc_ty, idx_ty, body, ys, rng = parts
    n = _zero_range(rng)
    if n is None or idx_ty != T.INT:
        return NoMatch(SKELETON, "fold does not iterate over range(0, n)")
    if not (_is_prim(body, "update", 3) and _is_var(body.args[0], 1) and _is_var(body.args[1], 0)):
        return NoMatch(SKELETON, "loop body is not acc[i := ...]")
    res = _abstract_index(body.args[2])
    if isinstance(res, NoMatch):
        return res
    new_body, xs_inner = res
    fbody = _drop_acc(new_body)
    if fbody is None:
        return NoMatch(SIDE_CONDITION, "the element function reads the accumulator")
    xs = shift(xs_inner, -2)
    elem = typecheck_term(xs, ctx()).elem
    return {"f": Lam(elem, fbody, "x"), "xs": xs, "ys": ys, "n": n}


def _map_introduce_build(inst):
    return Prim("map", (inst["f"], inst["xs"]))


def _map_introduce_obligations(inst):
    return _length_obligations(inst["xs"], [("ys", inst["ys"]), ("bound", inst["n"])], "the mapped array")


# -- range-remove -------------------------------------------------------------
# fold(λacc.λi. B[acc, xs[i]], a0, range(0, n))  ~>  fold(λacc.λx. B[acc, x], a0, xs)

def _range_remove_match(t, ctx):
    parts = _fold_parts(t)
    if parts is None:
        return NoMatch(SKELETON, "not a fold with a two-argument lambda")
    acc_ty, idx_ty, body, acc0, rng = parts
    n = _zero_range(rng)
    if n is None or idx_ty != T.INT:
        return NoMatch(SKELETON, "fold does not iterate over range(0, n)")
    res = _abstract_index(body)
    if isinstance(res, NoMatch):
        return res
    new_body, xs_inner = res
    xs = shift(xs_inner, -2)
    elem = typecheck_term(xs, ctx()).elem
    f = Lam(acc_ty, Lam(elem, new_body, "x"), "acc")
    return {"f": f, "acc0": acc0, "xs": xs, "n": n}


def _range_remove_build(inst):
    return Prim("fold", (inst["f"], inst["acc0"], inst["xs"]))


def _range_remove_obligations(inst):
    return _length_obligations(inst["xs"], [("bound", inst["n"])], "the indexed array")


# -- concat-intro -------------------------------------------------------------
# fold(λacc.λxs. fold(f, acc, xs), a0, xss)  ~>  fold(f, a0, concat(xss))

def _concat_intro_match(t, ctx):
    parts = _fold_parts(t)
    if parts is None:
        return NoMatch(SKELETON, "not a fold with a two-argument lambda")
    _acc_ty, _elem, body, acc0, xss = parts
    inner = body
    if not (_is_prim(inner, "fold", 3) and _is_var(inner.args[1], 1) and _is_var(inner.args[2], 0)):
        return NoMatch(SKELETON, "outer loop body is not fold(f, acc, xs) over the outer element")
    f = strengthen(inner.args[0], 2)
    if f is None:
        return NoMatch(SIDE_CONDITION, "inner loop function refers to the outer element or accumulator")
    return {"f": f, "acc0": acc0, "xss": xss}


def _concat_intro_build(inst):
    return Prim("fold", (inst["f"], inst["acc0"], Prim("concat", (inst["xss"],))))


# -- group-intro --------------------------------------------------------------
# fold(λacc.λx. acc[fst x := B[acc[fst x], snd x, fst x]], a0, xs)
#   ~>  fold(λacc.λy. acc[fst y := snd y], a0,
#            map(λp. (fst p, fold(λa.λv. B[a, v, fst p], init, snd p)), group(xs)))
# where init is c when a0 = replicate(n, c) and a0[fst p] otherwise.

class _Regroup:
    """Move a body from context [acc, x] to [p, a, v]."""

    def __init__(self):
        self.bad: Optional[str] = None

    def run(self, t: Term, b: int = 0) -> Term:
        # acc[fst x] -> a
        if (_is_prim(t, "index", 2) and _is_var(t.args[0], b + 1)
                and isinstance(t.args[1], Fst) and _is_var(t.args[1].pair, b)):
            return Var(b + 1, "a")
        if isinstance(t, Snd) and _is_var(t.pair, b):
            return Var(b, "v")
        if isinstance(t, Fst) and _is_var(t.pair, b):
            return Fst(Var(b + 2, "p"))
        if isinstance(t, Var):
            if t.index < b:
                return t
            if t.index == b:
                self.bad = "the update uses the element other than through fst/snd"
                return t
            if t.index == b + 1:
                self.bad = "the update reads the accumulator at another index"
                return t
            return Var(t.index + 1, t.name)
        ks = kids(t)
        if not ks:
            return t
        return with_kids(t, tuple(self.run(k, b + n) for k, n in zip(ks, binders(t))))


def _group_intro_match(t, ctx):
    parts = _fold_parts(t)
    if parts is None:
        return NoMatch(SKELETON, "not a fold with a two-argument lambda")
    acc_ty, elem, body, acc0, xs = parts
    if not (isinstance(elem, T.Prod) and isinstance(acc_ty, T.Arr)):
        return NoMatch(SKELETON, "fold does not run over key-value pairs into an array")
    if not (_is_prim(body, "update", 3) and _is_var(body.args[0], 1)
            and body.args[1] == Fst(Var(0))):
        return NoMatch(SKELETON, "loop body is not acc[fst x := ...]")
    rg = _Regroup()
    new_body = rg.run(body.args[2])
    if rg.bad:
        return NoMatch(SIDE_CONDITION, rg.bad)
    if _is_prim(acc0, "replicate", 2):
        init = shift(acc0.args[1], 1)
    else:
        init = Prim("index", (shift(acc0, 1), Fst(Var(0, "p"))))
    return {"f": Lam(acc_ty.elem, Lam(elem.right, new_body, "v"), "a"), "init": init,
            "acc0": acc0, "xs": xs, "key": elem.left, "val": elem.right, "acc_elem": acc_ty.elem}


def _group_intro_build(inst):
    key, val, a = inst["key"], inst["val"], inst["acc_elem"]
    write_back = Lam(T.Arr(a), Lam(T.Prod(key, a), Prim("update", (
        Var(1, "acc"), Fst(Var(0, "y")), Snd(Var(0, "y")))), "y"), "acc")
    per_key = Lam(T.Prod(key, T.Arr(val)), Pair(
        Fst(Var(0, "p")), Prim("fold", (inst["f"], inst["init"], Snd(Var(0, "p"))))), "p")
    updates = Prim("map", (per_key, Prim("group", (inst["xs"],))))
    return Prim("fold", (write_back, inst["acc0"], updates))


# -- definitional -------------------------------------------------------------

def _flatmap_match(t, ctx):
    if _is_prim(t, "concat", 1) and _is_prim(t.args[0], "map", 2):
        f, xss = t.args[0].args
        return {"f": f, "xss": xss}
    return NoMatch(SKELETON, "not concat(map(f, xss))")


def _flatmap_build(inst):
    return Prim("flatMap", (inst["f"], inst["xss"]))


def _rbk_match(t, ctx):
    if not (_is_prim(t, "map", 2) and _is_prim(t.args[1], "group", 1) and isinstance(t.args[0], Lam)):
        return NoMatch(SKELETON, "not map(λp. ..., group(xs))")
    lam = t.args[0]
    body = lam.body
    if not (isinstance(body, Pair) and body.left == Fst(Var(0))
            and _is_prim(body.right, "fold", 3) and body.right.args[2] == Snd(Var(0))):
        return NoMatch(SKELETON, "mapped function is not λp. (fst p, fold(f, i, snd p))")
    f = strengthen(body.right.args[0], 1)
    init = strengthen(body.right.args[1], 1)
    if f is None or init is None:
        return NoMatch(SIDE_CONDITION, "the reducer or its initial value depends on the key")
    v = lam.ty.right.elem
    if typecheck_term(f, ctx()) != T.Arrow(v, T.Arrow(v, v)):
        return NoMatch(SIDE_CONDITION, "the reducer's accumulator type differs from the value type")
    return {"f": f, "init": init, "xs": t.args[1].args[0]}


def _rbk_build(inst):
    return Prim("reduceByKey", (inst["f"], inst["init"], inst["xs"]))


RULES = (
    Rule("map-introduce", "structural",
         "A loop over range(0, n) that writes f(xs[i]) into ys[i] without otherwise "
         "touching the index becomes ys := map(f, xs). Obligations: xs, ys and n agree in length.",
         "fold(λacc.λi. acc[i := f(xs[i])], ys, range(0, n))", "map(f, xs)",
         _map_introduce_match, _map_introduce_build, _map_introduce_obligations),
    Rule("range-remove", "structural",
         "A loop over indices that only uses the index to read xs[i] iterates over the "
         "elements of xs directly. Obligation: length(xs) = n.",
         "fold(λacc.λi. f(acc, xs[i]), acc0, range(0, n))", "fold(λacc.λx. f(acc, x), acc0, xs)",
         _range_remove_match, _range_remove_build, _range_remove_obligations),
    Rule("concat-intro", "structural",
         "Two nested loops where the inner one runs over the outer element and nothing "
         "else refers to it collapse into one loop over concat(xss).",
         "fold(λacc.λxs. fold(f, acc, xs), acc0, xss)", "fold(f, acc0, concat(xss))",
         _concat_intro_match, _concat_intro_build),
    Rule("group-intro", "structural",
         "A loop over key-value pairs that updates acc[k] from its old value and v is "
         "split into group, a per-key fold, and a loop writing each result back. "
         "The update may also read the key.",
         "fold(λacc.λ(k,v). acc[k := f(acc[k], v)], acc0, xs)",
         "fold(λacc.λ(k,r). acc[k := r], acc0, map(λ(k,vs). (k, fold(f, acc0[k], vs)), group(xs)))",
         _group_intro_match, _group_intro_build),
    Rule("flatmap-fuse", "definitional",
         "concat(map(f, xss)) written as flatMap(f, xss); identical after synonym expansion.",
         "concat(map(f, xss))", "flatMap(f, xss)", _flatmap_match, _flatmap_build),
    Rule("reducebykey-fold", "definitional",
         "map(λ(k,vs). (k, fold(f, i, vs)), group(xs)) written as reduceByKey(f, i, xs); "
         "identical after synonym expansion.",
         "map(λ(k,vs). (k, fold(f, i, vs)), group(xs))", "reduceByKey(f, i, xs)",
         _rbk_match, _rbk_build),
)

_BY_NAME = {r.name: r for r in RULES}


def get_rule(name: str) -> Rule:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise KeyError(f"unknown rule {name!r}; known rules: {', '.join(_BY_NAME)}") from None


def list_rules() -> list:
    return list(RULES)


def rule_names() -> list:
    return [r.name for r in RULES]
