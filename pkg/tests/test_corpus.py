from fractions import Fraction

import pytest

from mrv.corpus import (
    CorpusError, PageRankInput, chain_path, get_chain, get_program, pagerank_reference, pagerank_trace, program_ids,
)
from mrv.ffl.evaluate import run_function
from mrv.gen import GenConfig, gen_inputs
from mrv.il.interp import interpret_il
from mrv.values import Val

from conftest import PAGERANK_INPUTS, listing, listing_term

F = Fraction


def test_ids_map_to_files():
    ids = program_ids()
    assert len(ids) == 11
    assert [i for i in ids if i.startswith("pagerank/")] == [f"pagerank/listing-{n}" for n in range(1, 10)]
    for pid in ids:
        e = get_program(pid)
        assert e.path.name == pid.split("/")[1] + ".il" and e.source.startswith("fn ") and e.note


def test_unknown_ids():
    with pytest.raises(CorpusError):
        get_program("pagerank/listing-0")
    with pytest.raises(CorpusError, match="wordcount"):
        get_chain("wordcount")
    with pytest.raises(KeyError):
        chain_path("kmeans")


def test_chains():
    pr = get_chain("pagerank")
    assert [p.path.name for p in pr.programs] == [f"listing-{n}.il" for n in range(1, 10)]
    assert [s.kind for s in pr.steps] == ["rewrite", "coupling", "rewrite", "coupling", "rewrite",
                                          "definitional", "rewrite", "definitional"]
    sa = get_chain("sumarrays")
    assert sa.steps[0].invariant.text == "sum_1 = sum_2 && zipped_2 = zip(xs_1, ys_1)"


def test_two_cycle():
    inp = PageRankInput(((1,), (0,)), F(1, 2), 1)
    assert pagerank_reference(inp) == [F(1, 2), F(1, 2)]
    args = (inp.links, inp.dampening, inp.iterations)
    assert interpret_il(listing(1), args) == Val((F(1, 2), F(1, 2)))


def test_self_loop_is_a_fixed_point():
    assert pagerank_reference(PageRankInput(((0,),), F(3, 4), 5)) == [F(1)]


def test_hand_computed_three_pages():
    # 0 -> 1, 2; 1 -> 2; 2 -> 0 with dampening 1/2, one iteration
    inp = PageRankInput(((1, 2), (2,), (0,)), F(1, 2), 1)
    third = F(1, 3)
    delta = [third, third / 2, third / 2 + third]
    assert pagerank_reference(inp) == [F(1, 2) * d + F(1, 6) for d in delta]


def test_invalid_inputs_are_rejected():
    for bad in (PageRankInput((), F(1, 2), 1), PageRankInput(((),), F(1, 2), 1),
                PageRankInput(((3,),), F(1, 2), 1), PageRankInput(((0,),), F(1), 1),
                PageRankInput(((0,),), F(1, 2), -1)):
        with pytest.raises(ValueError):
            pagerank_reference(bad)


def test_reference_matches_both_executions_of_the_original():
    params = listing(1).params
    count = 0
    for args in gen_inputs(params, PAGERANK_INPUTS, 42, GenConfig(trials=200)):
        expected = pagerank_reference(PageRankInput(*args))
        assert interpret_il(listing(1), args) == Val(tuple(expected))
        assert run_function(listing_term(1), args) == Val(tuple(expected))
        count += 1
    assert count == 200


def test_rank_mass_is_redistributed():
    for args in gen_inputs(listing(1).params, PAGERANK_INPUTS, 5, GenConfig(trials=200)):
        ranks, deltas = pagerank_trace(PageRankInput(*args))
        assert len(ranks) == args[2] + 1 and len(deltas) == args[2]
        for k, delta in enumerate(deltas, start=1):
            assert sum(delta) == sum(ranks[k - 1])
        assert all(sum(r) == 1 for r in ranks)
