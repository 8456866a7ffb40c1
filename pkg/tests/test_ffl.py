from fractions import Fraction

import pytest

from mrv import types as T
from mrv.ffl.check import FflTypeError, is_closed, typecheck_term
from mrv.ffl.evaluate import evaluate, run_function
from mrv.ffl.ops import (
    alpha_equal, expand_synonyms, has_synonyms, instantiate, normalize, quote, shift,
)
from mrv.ffl.render import render
from mrv.ffl.terms import (
    App, ArrLit, Case, If, Inl, Inr, Lam, Lit, Pair, Snd, Var, let,
)
from mrv.values import DIV_ZERO, INDEX_OOB, Diverged, PairV, RuntimeErr, Val, same_outcome, value_has_type

from termgen import KV, TermGen, random_term, p

INT, RAT, BOOL = T.INT, T.RAT, T.BOOL
F = Fraction
SEEDS = range(1000)


def lit(v):
    return Lit(v, RAT if isinstance(v, Fraction) else BOOL if isinstance(v, bool) else INT)


def arr(*xs, elem=INT):
    return ArrLit(tuple(lit(x) for x in xs), elem)


def kv_arr(*pairs):
    return ArrLit(tuple(Pair(lit(k), lit(v)) for k, v in pairs), KV)


# -- typing -------------------------------------------------------------------

def test_fold_type():
    f = Lam(INT, Lam(INT, p("add", Var(1), Var(0))))
    assert typecheck_term(p("fold", f, lit(0), arr(1, 2))) == INT


def test_fold_rejects_mismatched_function():
    f = Lam(RAT, Lam(INT, Var(1)))
    with pytest.raises(FflTypeError):
        typecheck_term(p("fold", f, lit(0), arr(1)))


def test_iter_type():
    body = Lam(INT, If(p("lt", Var(0), lit(3)), Inr(p("add", Var(0), lit(1)), INT), Inl(Var(0), INT)))
    assert typecheck_term(p("iter", body)) == T.Arrow(INT, INT)


def test_group_and_reduce_types():
    xs = kv_arr((1, 2))
    assert typecheck_term(p("group", xs)) == T.Arr(T.Prod(INT, T.Arr(INT)))
    f = Lam(INT, Lam(INT, p("add", Var(1), Var(0))))
    assert typecheck_term(p("reduceByKey", f, lit(0), xs)) == T.Arr(KV)


def test_unbound_variable():
    with pytest.raises(FflTypeError):
        typecheck_term(Var(0))
    assert not is_closed(Lam(INT, Var(1)))
    assert is_closed(Lam(INT, Var(0)))


def test_bad_literal():
    with pytest.raises(FflTypeError):
        typecheck_term(Lit(True, INT))


# -- evaluation -----------------------------------------------------------------

def test_arithmetic():
    assert evaluate(p("div", lit(F(1)), lit(F(3)))) == Val(F(1, 3))
    assert evaluate(p("div", lit(F(1)), lit(F(0)))).kind == DIV_ZERO
    assert evaluate(p("index", arr(1), lit(1))).kind == INDEX_OOB


def test_update_is_functional():
    t = let(T.Arr(INT), arr(1, 2), Pair(Var(0), p("update", Var(0), lit(0), lit(9))))
    assert evaluate(t) == Val(PairV((1, 2), (9, 2)))


def test_group_orders_by_first_occurrence():
    out = evaluate(p("group", kv_arr((2, 1), (0, 5), (2, 3))))
    assert out == Val((PairV(2, (1, 3)), PairV(0, (5,))))


def test_reduce_by_key():
    f = Lam(INT, Lam(INT, p("add", Var(1), Var(0))))
    out = evaluate(p("reduceByKey", f, lit(10), kv_arr((2, 1), (0, 5), (2, 3))))
    assert out == Val((PairV(2, 14), PairV(0, 15)))


def test_iter_loops_until_inl():
    body = Lam(INT, If(p("lt", Var(0), lit(5)), Inr(p("add", Var(0), lit(1)), INT), Inl(Var(0), INT)))
    assert evaluate(App(p("iter", body), lit(0))) == Val(5)


def test_iter_without_exit_diverges():
    body = Lam(INT, Inr(p("add", Var(0), lit(1)), INT))
    out = evaluate(App(p("iter", body), lit(0)), budget=1000)
    assert isinstance(out, Diverged)


def test_case_binds_payload():
    t = Case(Inr(lit(4), BOOL), lit(0), p("mul", Var(0), lit(2)))
    assert evaluate(t) == Val(8)


def test_short_circuit():
    bad = p("eq", p("index", arr(), lit(0)), lit(0))
    assert evaluate(p("and", lit(False), bad)) == Val(False)
    assert evaluate(p("or", lit(True), bad)) == Val(True)
    assert isinstance(evaluate(p("and", lit(True), bad)), RuntimeErr)


def test_run_function_applies_arguments():
    f = Lam(INT, Lam(INT, p("sub", Var(1), Var(0))))
    assert run_function(f, (10, 3)) == Val(7)


def test_zip_length_mismatch():
    assert evaluate(p("zip", arr(1), arr(1, 2))).kind == "InvalidArgument"


# -- operations -------------------------------------------------------------

def test_alpha_equal_ignores_names():
    assert alpha_equal(Lam(INT, Var(0, "x"), "x"), Lam(INT, Var(0, "y"), "y"))
    assert not alpha_equal(Lam(INT, Lam(INT, Var(0))), Lam(INT, Lam(INT, Var(1))))


def test_normalize_inlines_single_use():
    t = let(INT, lit(3), p("add", Var(0), lit(1)))
    assert normalize(t) == p("add", lit(3), lit(1))


def test_normalize_keeps_lets_used_under_lambda():
    t = let(INT, lit(3), p("map", Lam(INT, p("add", Var(0), Var(1))), arr(1, 2)))
    assert normalize(t) == t


def test_normalize_keeps_multi_use():
    t = let(INT, lit(3), p("add", Var(0), Var(0)))
    assert normalize(t) == t


def test_expand_flatmap():
    f = Lam(INT, arr(1))
    t = p("flatMap", f, arr(1, 2))
    assert expand_synonyms(t) == p("concat", p("map", f, arr(1, 2)))
    assert has_synonyms(t) and not has_synonyms(expand_synonyms(t))


def test_quote_round_trip():
    v = (PairV(1, (F(1, 2),)), PairV(0, ()))
    ty = T.Arr(T.Prod(INT, T.Arr(RAT)))
    q = quote(v, ty)
    assert typecheck_term(q) == ty
    assert evaluate(q) == Val(v)


def test_render_let_and_index():
    t = Lam(T.Arr(INT), let(INT, p("index", Var(0), lit(0)), p("add", Var(0), Var(0)), "y"), "xs")
    assert render(t) == "(λxs:[Int]. let y:Int = xs[0] in\n(y + y))"
    assert render(p("index", Snd(Var(0)), lit(1)), ("acc",)) == "(snd acc)[1]"


# -- generated properties -----------------------------------------------------

def test_type_preservation_on_generated_terms():
    for seed in SEEDS:
        t, ty = random_term(seed)
        assert typecheck_term(t) == ty
        out = evaluate(t, 100_000)
        assert isinstance(out, (Val, RuntimeErr, Diverged))
        if isinstance(out, Val):
            assert value_has_type(out.value, ty), (seed, render(t))


def test_evaluation_is_deterministic():
    for seed in range(300):
        t, _ = random_term(seed)
        assert evaluate(t, 100_000) == evaluate(t, 100_000)


def test_synonym_coherence():
    checked = 0
    for seed in SEEDS:
        t, ty = random_term(seed)
        if not has_synonyms(t):
            continue
        e = expand_synonyms(t)
        assert typecheck_term(e) == ty
        assert same_outcome(evaluate(t), evaluate(e)), (seed, render(t))
        checked += 1
    assert checked >= 100


def test_normalize_preserves_values():
    for seed in SEEDS:
        t, ty = random_term(seed)
        n = normalize(t)
        assert typecheck_term(n) == ty
        out = evaluate(t)
        if isinstance(out, Val):
            assert evaluate(n) == out, (seed, render(t))


def test_shift_then_instantiate_is_identity():
    for seed in range(300):
        t, _ = random_term(seed)
        s, _ = random_term(seed + 10_000)
        assert shift(shift(t, 3), -3) == t
        assert instantiate(shift(t, 1), s) == t


def test_beta_reduction_agrees_with_evaluation():
    import random
    for seed in range(300):
        rng = random.Random(seed)
        g = TermGen(rng, 3)
        arg_ty = rng.choice((INT, RAT, T.Arr(INT)))
        body_ty = rng.choice((INT, BOOL, T.Arr(INT)))
        body = g.term(body_ty, (arg_ty,))
        arg = g.term(arg_ty)
        if not isinstance(evaluate(arg), Val):
            continue
        assert same_outcome(evaluate(App(Lam(arg_ty, body), arg)), evaluate(instantiate(body, arg)))


def test_geometric_array_growth_runs_out_of_budget():
    # each step squares the array length; this must stop as Diverged, not exhaust memory
    square = Lam(T.Arr(INT), Lam(INT, p("flatMap", Lam(INT, Var(2)), Var(1))))
    t = p("fold", square, arr(1, 2, 3), p("range", lit(0), lit(12)))
    assert typecheck_term(t) == T.Arr(INT)
    assert isinstance(evaluate(t, budget=100_000), Diverged)
    assert isinstance(evaluate(p("replicate", lit(10**12), lit(0))), Diverged)
