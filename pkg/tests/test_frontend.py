from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mrv import types as T
from mrv.corpus import get_program, program_ids
from mrv.gen import GenConfig, gen_inputs
from mrv.il.interp import interpret_il
from mrv.il.parser import ParseError, parse_expr, parse_program, parse_type
from mrv.il.printer import expr_str, program_str
from mrv.il.typecheck import TypeErrors, load_program, typecheck_expr
from mrv.values import DIV_ZERO, INDEX_OOB, Diverged, RuntimeErr, Val, value_has_type

from conftest import constraints_for, typed

F = Fraction


def run(src, *args, budget=10_000):
    return interpret_il(load_program(src), args, budget)


def type_messages(src):
    with pytest.raises(TypeErrors) as info:
        load_program(src)
    return [e.message for e in info.value.errors]


# -- parsing ------------------------------------------------------------------

def test_listing_one_header():
    p = parse_program(get_program("pagerank/listing-1").source)
    assert p.name == "pageRank"
    assert [q.name for q in p.params] == ["links", "dampening", "iterations"]
    assert [q.type for q in p.params] == [T.Arr(T.Arr(T.INT)), T.RAT, T.INT]
    assert p.ret == T.Arr(T.RAT)


@pytest.mark.parametrize("pid", program_ids())
def test_round_trip(pid):
    ast = parse_program(get_program(pid).source)
    assert parse_program(program_str(ast)) == ast


def test_missing_semicolon_reports_position():
    with pytest.raises(ParseError) as info:
        parse_program("fn f() {\n  var x := 1\n  return x;\n}")
    err = info.value
    assert (err.line, err.col) == (3, 3)
    assert "';'" in err.expected


def test_parse_error_render_has_filename():
    with pytest.raises(ParseError) as info:
        parse_program("fn f( {", "bad.il")
    assert info.value.render().startswith("bad.il:1:")


def test_types_parse():
    assert parse_type("[Int * Rat]") == T.Arr(T.Prod(T.INT, T.RAT))
    assert parse_type("[[Int]] * Rat") == T.Prod(T.Arr(T.Arr(T.INT)), T.RAT)


def test_precedence_in_printer():
    e = parse_expr("(1 - 2) - 3 * (4 + 5)")
    assert expr_str(e) == "1 - 2 - 3 * (4 + 5)"
    assert parse_expr(expr_str(parse_expr("1 - (2 - 3)"))) == parse_expr("1 - (2 - 3)")


# -- typing -------------------------------------------------------------------

def test_corpus_types(corpus_id):
    tp = typed(corpus_id)
    expected = T.Arr(T.RAT) if corpus_id.startswith("pagerank") else T.Arr(T.INT)
    assert tp.ret_type == expected


def test_loop_variable_is_immutable():
    msgs = type_messages("fn f(xs: [Int]) { for (x : xs) { x := 1; } return 0; }")
    assert any("loop variable" in m for m in msgs)


def test_parameters_are_read_only():
    msgs = type_messages("fn f(n: Int) { n := n + 1; return n; }")
    assert any("read-only" in m for m in msgs)


def test_shadowing_local_rejected():
    msgs = type_messages("fn f() { var x := 1; for (i : range(0, 2)) { var x := 2; } return x; }")
    assert msgs


def test_all_errors_reported():
    msgs = type_messages("fn f() { var a : Int := true; var b : Bool := 1; return y; }")
    assert len(msgs) == 3


def test_int_literal_checked_as_rat():
    tp = load_program("fn f() -> Rat { var r : Rat := 1; return r / 2; }")
    assert interpret_il(tp, ()) == Val(F(1, 2))


def test_rat_literal_forms_agree():
    a = run("fn f(n: Int) -> Rat { return 1. / n; }", 3)
    b = run("fn f(n: Int) -> Rat { return 1 / n; }", 3)
    assert a == b == Val(F(1, 3))


def test_division_always_rational():
    assert run("fn f() { return 4 / 2; }") == Val(F(2))
    assert isinstance(run("fn f() { return 4 / 2; }").value, Fraction)


def test_int_to_rat_promotion_in_arithmetic():
    assert run("fn f(d: Rat) -> Rat { return (1 - d) / 2; }", F(1, 3)) == Val(F(1, 3))


def test_guard_must_be_bool():
    msgs = type_messages("fn f() { var i := 0; while (i) { i := i + 1; } return i; }")
    assert msgs


def test_typecheck_expr_with_expected():
    e = parse_expr("[[1], [0]]")
    assert typecheck_expr(e, {}, T.Arr(T.Arr(T.INT))).type == T.Arr(T.Arr(T.INT))
    with pytest.raises(TypeErrors):
        typecheck_expr(parse_expr("[true]"), {}, T.Arr(T.INT))


def test_lambda_only_as_builtin_argument():
    assert type_messages("fn f() { var g := (x : Int) => x; return 0; }")


# -- interpretation -----------------------------------------------------------

def test_pagerank_two_cycle():
    assert interpret_il(typed("pagerank/listing-1"), (((1,), (0,)), F(1, 2), 1)) == Val((F(1, 2), F(1, 2)))


def test_pagerank_three_pages():
    args = (((1, 2), (0,), (0, 1)), F(1, 3), 3)
    want = Val((F(247, 648), F(1, 3), F(185, 648)))
    for n in range(1, 10):
        assert interpret_il(typed(f"pagerank/listing-{n}"), args) == want


def test_sumarrays_examples():
    assert interpret_il(typed("sumarrays/plain"), ((1, 2), (10, 20))) == Val((11, 22))
    assert interpret_il(typed("sumarrays/zipped"), ((), ())) == Val(())


def test_runtime_errors():
    assert run("fn f(xs: [Int]) { return xs[3]; }", (1,)).kind == INDEX_OOB
    assert run("fn f(n: Int) -> Rat { return 1 / n; }", 0).kind == DIV_ZERO
    out = run("fn f(xs: [Int]) { return xs[0]; }", ())
    assert isinstance(out, RuntimeErr) and out.where


def test_while_true_diverges():
    out = run("fn f() { var x := 0; while (true) { x := x + 1; } return x; }", budget=500)
    assert isinstance(out, Diverged)


def test_short_circuit_avoids_error():
    src = "fn f(xs: [Int]) { var ok := length(xs) > 0 && xs[0] = 1; return ok; }"
    assert run(src, ()) == Val(False)
    assert run(src, (1,)) == Val(True)


def test_builtins():
    assert run("fn f() { return group([(1, 5), (0, 2), (1, 3)]); }").value is not None
    assert run("fn f() { return fold((a: Int) (x: Int) => a + x, 0, range(0, 5)); }") == Val(10)
    out = run("fn f() { return reduceByKey((a: Int) (b: Int) => a + b, 0, [(1, 5), (0, 2), (1, 3)]); }")
    assert len(out.value) == 2


def test_invalid_argument_errors():
    assert run("fn f() { return zip([1], [1, 2]); }").kind == "InvalidArgument"
    assert run("fn f() { return replicate(0 - 1, 0); }").kind == "InvalidArgument"


# -- properties ---------------------------------------------------------------

@pytest.mark.parametrize("pid", program_ids())
def test_interpreter_never_type_fails(pid):
    tp = typed(pid)
    cfg = GenConfig(trials=100)
    for args in gen_inputs(tp.params, constraints_for(pid), 7, cfg):
        out = interpret_il(tp, args)
        assert isinstance(out, (Val, Diverged, RuntimeErr))
        if isinstance(out, Val):
            assert value_has_type(out.value, tp.ret_type)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-20, 20), max_size=5), st.integers(-3, 3))
def test_arithmetic_matches_python(xs, k):
    src = "fn f(xs: [Int], k: Int) { var s := 0; for (x : xs) { s := s + x * k - 1; } return s; }"
    assert run(src, tuple(xs), k) == Val(sum(x * k - 1 for x in xs))


@settings(max_examples=40, deadline=None)
@given(st.recursive(
    st.integers(0, 9).map(str) | st.sampled_from(["a", "b"]),
    lambda inner: st.tuples(inner, st.sampled_from(["+", "-", "*"]), inner).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
    max_leaves=8))
def test_expression_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(expr_str(e)) == e
