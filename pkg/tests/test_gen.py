import random
from fractions import Fraction

import pytest

from mrv import types as T
from mrv.gen import (
    BOUNDARY_GRAPHS, Constraints, GenConfig, GeneratorError, gen_inputs, gen_one, random_graph,
)
from mrv.values import value_has_type

from conftest import PAGERANK_INPUTS, SUM_INPUTS

PR_PARAMS = [("links", T.Arr(T.Arr(T.INT))), ("dampening", T.RAT), ("iterations", T.INT)]
SUM_PARAMS = [("xs", T.Arr(T.INT)), ("ys", T.Arr(T.INT))]


def test_trial_is_a_pure_function_of_seed_and_trial():
    a = list(gen_inputs(PR_PARAMS, PAGERANK_INPUTS, 7))
    b = list(gen_inputs(PR_PARAMS, PAGERANK_INPUTS, 7))
    assert a == b and len(a) == 200
    assert gen_one(PR_PARAMS, PAGERANK_INPUTS, 7, 123) == a[123]
    assert list(gen_inputs(PR_PARAMS, PAGERANK_INPUTS, 8)) != a


def test_boundary_graphs_come_first():
    first = [args[0] for args in gen_inputs(PR_PARAMS, PAGERANK_INPUTS, 42, trials=3)]
    assert first == [((0,),), ((1,), (0,)), ((1,), (1,))] == list(BOUNDARY_GRAPHS)


def test_pagerank_inputs_are_well_formed():
    cfg = GenConfig()
    zero_in = False
    for links, d, k in gen_inputs(PR_PARAMS, PAGERANK_INPUTS, 42, cfg):
        n = len(links)
        assert 1 <= n <= cfg.max_graph
        assert all(row and all(0 <= t < n for t in row) for row in links)
        assert isinstance(d, Fraction) and 0 < d < 1
        assert 0 <= k <= cfg.max_iter
        zero_in |= any(all(p not in row for row in links) for p in range(n))
    assert zero_in  # pages nobody links to are exercised


def test_same_length_groups():
    lens = set()
    for xs, ys in gen_inputs(SUM_PARAMS, SUM_INPUTS, 3):
        assert len(xs) == len(ys)
        lens.add(len(xs))
    assert 0 in lens and len(lens) > 3


def test_unconstrained_values_have_their_types():
    types = [T.INT, T.RAT, T.BOOL, T.UNIT, T.Arr(T.Prod(T.INT, T.Arr(T.RAT))), T.Sum(T.INT, T.BOOL)]
    params = [(f"p{i}", ty) for i, ty in enumerate(types)]
    for args in gen_inputs(params, Constraints(), 1, trials=50):
        assert all(value_has_type(v, ty) for v, ty in zip(args, types))


def test_function_types_are_rejected():
    with pytest.raises(GeneratorError):
        list(gen_inputs([("f", T.Arrow(T.INT, T.INT))]))
    with pytest.raises(GeneratorError):
        gen_one([("x", T.Arr(T.Arrow(T.INT, T.INT)))], Constraints(), 0, 0)


def test_bad_constraints():
    with pytest.raises(GeneratorError):
        Constraints.from_json({"links": "tree"})
    with pytest.raises(GeneratorError):
        Constraints.from_json({"same_length": "xs"})
    with pytest.raises(GeneratorError):
        gen_one([("links", T.INT)], Constraints.from_json({"links": "graph"}), 0, 5)


def test_random_graph_respects_size():
    rng = random.Random(0)
    for _ in range(100):
        g = random_graph(rng, 3)
        assert 1 <= len(g) <= 3
