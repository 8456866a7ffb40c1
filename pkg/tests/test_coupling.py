from fractions import Fraction

import pytest

from mrv.coupling import (
    AFTER_ITERATION, AT_ENTRY, GUARD_DISAGREEMENT, OUTPUT_MISMATCH, SIDE_DIVERGENCE, CouplingPredicate, Fail,
    Pass, PredicateError, StructureError, build_product, check_coupling, evaluate_predicate, split_side,
)
from mrv.corpus import get_chain
from mrv.gen import GenConfig
from mrv.il.typecheck import load_program
from mrv.values import PairV

from conftest import PAGERANK_INPUTS, SUM_INPUTS, listing, typed

SUM_INV = "sum_1 = sum_2 && zipped_2 = zip(xs_1, ys_1)"
FLIPPED = "sum_1 = sum_2 && zipped_2 = zip(ys_1, xs_1)"
INV_23 = "newRanks_1 = newRanks_2 && outRanks_2 = zip(links_1, ranks_1)"
INV_45 = ("newRanks_1 = newRanks_2 && forall i in outRanks_1, j in fst outRanks_1[i]: "
          "fst linksAndContrib_2[i][j] = (fst outRanks_1[i])[j] && "
          "snd linksAndContrib_2[i][j] = snd outRanks_1[i] / length(fst outRanks_1[i])")


def sums():
    return typed("sumarrays/plain"), typed("sumarrays/zipped")


def counter(bound, ret="s"):
    return load_program(
        f"fn f(n: Int) {{ var s := 0; var i := 0; while (i < {bound}) {{ s := s + i; i := i + 1; }} return {ret}; }}")


def test_sumarrays_passes():
    r = check_coupling(*sums(), SUM_INV, constraints=SUM_INPUTS)
    assert isinstance(r, Pass) and r.trials == 200
    assert r.iterations > 0 and r.checks == r.iterations
    assert 0 in r.per_trial  # empty arrays are covered


def test_flipped_zip_is_caught_and_replayable():
    r = check_coupling(*sums(), FLIPPED, constraints=SUM_INPUTS)
    assert isinstance(r, Fail) and r.kind == AFTER_ITERATION
    assert (r.seed, r.trial, r.iteration) == (42, 1, 0)
    assert "zipped" in r.states[1]
    again = check_coupling(*sums(), FLIPPED, GenConfig(seed=r.seed), constraints=SUM_INPUTS, only_trial=r.trial)
    assert again == r
    assert "seed 42, trial 1" in r.summary()


def test_pagerank_couplings_pass():
    cfg = GenConfig(trials=100)
    r = check_coupling(listing(2), listing(3), INV_23, cfg, at=[2, 3], constraints=PAGERANK_INPUTS)
    assert isinstance(r, Pass), r.summary()
    r = check_coupling(listing(4), listing(5), INV_45, cfg, at=[3, 4], constraints=PAGERANK_INPUTS)
    assert isinstance(r, Pass), r.summary()


def test_manifest_invariants_are_the_tested_ones():
    steps = get_chain("pagerank").steps
    assert (steps[1].invariant.text, steps[1].at) == (INV_23, [2, 3])
    assert (steps[3].invariant.text, steps[3].at) == (INV_45, [3, 4])


def test_head_point_checks_entry():
    r = check_coupling(*sums(), SUM_INV, at="head", constraints=SUM_INPUTS)
    assert isinstance(r, Pass) and r.checks == r.iterations + r.trials
    r = check_coupling(*sums(), "length(sum_1) = length(sum_2) + 1", at="head", constraints=SUM_INPUTS)
    assert isinstance(r, Fail) and r.kind == AT_ENTRY and r.iteration is None


def test_guard_disagreement():
    r = check_coupling(counter("n"), counter("n + 1"), "s_1 = s_2")
    assert isinstance(r, Fail) and r.kind == GUARD_DISAGREEMENT


def test_output_mismatch():
    r = check_coupling(counter("n"), counter("n", "s + 1"), "s_1 = s_2 && i_1 = i_2")
    assert isinstance(r, Fail) and r.kind == OUTPUT_MISMATCH


def test_budget_exhaustion_is_side_divergence():
    r = check_coupling(listing(2), listing(3), INV_23, GenConfig(trials=20), at=[2, 3],
                       constraints=PAGERANK_INPUTS, budget=40)
    assert isinstance(r, Fail) and r.kind == SIDE_DIVERGENCE


def test_nonterminating_pair_is_side_divergence():
    spin = load_program("fn f(n: Int) { var s := 0; while (0 = 0) { s := s + 1; } return s; }")
    r = check_coupling(spin, spin, "s_1 = s_2", GenConfig(trials=3), budget=2_000)
    assert isinstance(r, Fail) and r.kind == SIDE_DIVERGENCE


def test_agreeing_runtime_errors_are_counted():
    bad = load_program("fn f(n: Int) { var s : Rat := 0; var i := 0; while (i < 2) { s := s + 1 / (i - i); "
                       "i := i + 1; } return s; }")
    r = check_coupling(bad, bad, "s_1 = s_2", GenConfig(trials=5))
    assert isinstance(r, Pass) and r.errors_agreed == 5


def test_structure_errors():
    with pytest.raises(StructureError):
        check_coupling(listing(1), typed("sumarrays/plain"), "1 = 1")
    no_loop = load_program("fn f(n: Int) { return n; }")
    with pytest.raises(StructureError):
        check_coupling(no_loop, no_loop, "n_1 = n_2")
    with pytest.raises(StructureError):
        check_coupling(*sums(), SUM_INV, at=[9, 0])


def test_product_splits_around_the_loop():
    prod = build_product(*sums())
    assert len(prod.left.prelude) == 1 and len(prod.right.prelude) == 2
    assert len(prod.left.body) == len(prod.right.body) == 1
    assert split_side("zipped_2") == ("zipped", 2)


def test_predicate_errors():
    with pytest.raises(PredicateError):
        CouplingPredicate.parse("sum_1 = ")
    with pytest.raises(PredicateError):
        CouplingPredicate.parse("sum = sum_2")
    with pytest.raises(PredicateError):
        CouplingPredicate.parse("nothere_1 = sum_2").typecheck(*sums())
    with pytest.raises(PredicateError):
        CouplingPredicate.parse("sum_1 = xs_1[0] + 1").typecheck(*sums())
    with pytest.raises(PredicateError):
        evaluate_predicate("xs_1[3] = 0", {"xs": (1,)}, {})


def test_predicate_evaluation():
    s1 = {"xs": (1, 2), "ys": (3, 4), "r": Fraction(1, 2)}
    s2 = {"zipped": (PairV(1, 3), PairV(2, 4))}
    assert evaluate_predicate("zipped_2 = zip(xs_1, ys_1)", s1, s2)
    assert not evaluate_predicate("zipped_2 = zip(ys_1, xs_1)", s1, s2)
    assert evaluate_predicate("forall i in xs_1: fst zipped_2[i] = xs_1[i]", s1, s2)
    assert evaluate_predicate("r_1 * 2 = 1 && !(r_1 = 0)", s1, s2)
