import json

import pytest

from mrv.chain import (
    FAILED, JUSTIFIED, VALIDATED, ChainConfig, ManifestError, differential_test, load_manifest, verify_chain,
    with_overrides,
)
from mrv.corpus import chain_path, get_chain
from mrv.il.typecheck import load_program

from conftest import listing
from mutants import Workspace

EXPECTED = [
    ("rewrite map-introduce", JUSTIFIED),
    ("coupling", VALIDATED),
    ("rewrite range-remove", JUSTIFIED),
    ("coupling", VALIDATED),
    ("rewrite concat-intro", JUSTIFIED),
    ("definitional flatmap-fuse", JUSTIFIED),
    ("rewrite group-intro", JUSTIFIED),
    ("definitional reducebykey-fold", JUSTIFIED),
]


@pytest.fixture(scope="module")
def pagerank_report():
    return verify_chain(get_chain("pagerank"))


@pytest.fixture
def ws(tmp_path):
    return Workspace(tmp_path / "corpus")


def test_pagerank_chain_passes(pagerank_report):
    r = pagerank_report
    assert r.overall == "Pass"
    assert [(s.method, s.verdict) for s in r.steps] == EXPECTED
    assert [(s.source, s.target) for s in r.steps][0] == ("listing-1.il", "listing-2.il")
    assert r.endpoint.trials == 200 and r.endpoint.mismatches == 0
    assert all(ok for s in r.steps for _, _, ok in s.obligations)
    assert r.seconds < 60


def test_report_formats(pagerank_report):
    js = pagerank_report.to_json()
    json.dumps(js)
    assert js["overall"] == "Pass" and len(js["steps"]) == 8
    assert js["config"] == {"trials": 200, "seed": 42, "budget": 10**6, "maxGraph": 6, "maxIter": 3}
    assert js["steps"][1]["verdict"] == VALIDATED
    text = pagerank_report.to_text(verbose=True)
    assert "overall: Pass" in text and "endpoint differential: 200 trials, 0 mismatches" in text
    assert "obligation" in text


def test_step_order_does_not_matter():
    m = with_overrides(get_chain("pagerank"), trials=40)
    a = verify_chain(m)
    b = verify_chain(m, order=[7, 3, 5, 0, 6, 1, 4, 2])
    assert [(s.index, s.verdict, s.detail) for s in a.steps] == [(s.index, s.verdict, s.detail) for s in b.steps]


def test_sumarrays_chain():
    r = verify_chain(get_chain("sumarrays"))
    assert r.ok and [s.verdict for s in r.steps] == [VALIDATED]


def test_overrides():
    m = with_overrides(get_chain("sumarrays"), trials=5, seed=None)
    assert m.config.trials == 5 and m.config.seed == 42
    assert with_overrides(m) is m


# -- mutations -------------------------------------------------------------------

def test_wrong_rule_name_fails_the_step(ws):
    ws.data["steps"][0]["rule"] = "range-remove"
    r = verify_chain(ws.manifest(trials=30))
    assert r.steps[0].verdict == FAILED and r.overall == "Fail"
    assert "searched" in r.steps[0].detail
    assert all(s.ok for s in r.steps[1:])


def test_altered_intermediate_program_is_caught(ws):
    ws.edit_program("listing-5.il", "(link, snd links_rank / length(fst links_rank))",
                    "(link, snd links_rank / (length(fst links_rank) + 1))")
    r = verify_chain(ws.manifest(trials=30))
    assert r.overall == "Fail"
    assert r.steps[3].verdict == FAILED and r.steps[4].verdict == FAILED
    assert "InvariantBrokenAfterIteration" in r.steps[3].detail
    assert r.endpoint.ok  # the endpoints themselves were not touched


def test_corrupted_invariant_is_caught(ws):
    ws.data["steps"][1]["invariant"] = "newRanks_1 = newRanks_2 && outRanks_2 = zip(links_1, newRanks_1)"
    r = verify_chain(ws.manifest(trials=30))
    assert r.steps[1].verdict == FAILED and r.overall == "Fail"


def test_altered_endpoint_fails_the_differential(ws):
    ws.edit_program("listing-9.il", "dampening * rank", "(1 + dampening) * rank")
    r = verify_chain(ws.manifest(trials=50))
    assert r.endpoint.mismatches > 0 and r.overall == "Fail"
    assert r.steps[7].verdict == FAILED
    trial, args, o1, o2 = r.endpoint.witnesses[0]
    assert o1 != o2
    assert "vs" in r.to_text()


def test_endpoint_differential_counts_divergence():
    spin = load_program("fn f(n: Int) { var x := n; while (x = x) { x := x + 1; } return x; }")
    s = differential_test(spin, spin, ChainConfig(trials=4, budget=2_000))
    assert s.ok and s.diverged == 4
    loop = load_program("fn f(n: Int) { var x := n; while (x < 3) { x := x + 1; } return x; }")
    s = differential_test(spin, loop, ChainConfig(trials=4, budget=2_000))
    assert not s.ok and s.mismatches == 4


def test_low_budget_is_never_a_silent_pass():
    r = verify_chain(with_overrides(get_chain("pagerank"), trials=10, budget=50))
    assert r.overall == "Fail"
    coupling = [s for s in r.steps if s.kind == "coupling"]
    assert all(s.verdict == FAILED and "SideDivergence" in s.detail for s in coupling)
    assert r.endpoint.diverged > 0


def test_step_exception_becomes_failed(ws, monkeypatch):
    import mrv.chain as chain
    m = ws.manifest(trials=5)

    def boom(*a, **k):
        raise RuntimeError("boom")
    monkeypatch.setattr(chain, "check_coupling", boom)
    r = verify_chain(m)
    assert r.steps[1].verdict == FAILED and "internal error: RuntimeError: boom" in r.steps[1].detail
    assert r.steps[2].verdict == JUSTIFIED


# -- manifest validation ------------------------------------------------------

def _expect(ws, where, match=None):
    with pytest.raises(ManifestError) as exc:
        ws.manifest()
    assert exc.value.where.startswith(where), str(exc.value)
    if match:
        assert match in exc.value.cause
    return exc.value


def test_unknown_rule(ws):
    ws.data["steps"][0]["rule"] = "fold-fuse"
    _expect(ws, "steps[0].rule", "fold-fuse")


def test_step_count_must_match(ws):
    ws.data["steps"].pop()
    _expect(ws, "steps", "need 8 steps")


def test_bad_annotation_point(ws):
    ws.data["steps"][1]["at"] = "middle"
    _expect(ws, "steps[1].at")


def test_invariant_over_unknown_variable(ws):
    ws.data["steps"][1]["invariant"] = "nothing_1 = newRanks_2"
    _expect(ws, "steps[1].invariant", "nothing")


def test_unknown_fields(ws):
    ws.data["steps"][0]["rules"] = "map-introduce"
    _expect(ws, "steps[0].rules")
    del ws.data["steps"][0]["rules"]
    ws.data["config"]["trails"] = 5
    _expect(ws, "config.trails")


def test_missing_program(ws):
    ws.data["programs"][3] = "pagerank/listing-0.il"
    _expect(ws, "programs[3]", "cannot read")


def test_program_with_type_error(ws):
    ws.edit_program("listing-4.il", "var iter : Int := 0;", "var iter : Int := 0 < 1;")
    _expect(ws, "programs[3]")


def test_endpoint_signatures_must_agree(ws):
    ws.data["programs"] = ["pagerank/listing-1.il", "sumarrays/plain.il"]
    ws.data["steps"] = [{"kind": "definitional"}]
    _expect(ws, "programs", "signatures")


def test_bad_json_and_missing_file(tmp_path):
    bad = tmp_path / "bad.chain.json"
    bad.write_text("{ not json")
    with pytest.raises(ManifestError, match="invalid JSON"):
        load_manifest(bad)
    with pytest.raises(ManifestError, match="cannot read"):
        load_manifest(tmp_path / "absent.chain.json")


def test_shipped_manifests_load():
    m = load_manifest(chain_path("pagerank"))
    assert len(m.programs) == 9 and len(m.steps) == 8
    assert m.config.trials == 200 and m.config.budget == 10**6
    assert m.programs[0].typed.signature == listing(1).signature
