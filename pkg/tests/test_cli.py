import json

from click.testing import CliRunner

from mrv.cli import main
from mrv.corpus import chain_path, get_program
from mrv.rewrite.rules import rule_names

LISTING_1 = str(get_program("pagerank/listing-1").path)
LISTING_9 = str(get_program("pagerank/listing-9").path)


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_check_pass_text():
    r = invoke("check", str(chain_path("sumarrays")))
    assert r.exit_code == 0, r.output
    assert "overall: Pass" in r.output


def test_check_json_with_overrides():
    r = invoke("check", str(chain_path("pagerank")), "--report", "json", "--trials", "20", "--seed", "3")
    assert r.exit_code == 0, r.output
    data = json.loads(r.output)
    assert data["overall"] == "Pass" and data["config"]["trials"] == 20 and data["config"]["seed"] == 3
    assert [s["verdict"] for s in data["steps"]].count("Justified") == 6


def test_check_failure_exit_code():
    r = invoke("check", str(chain_path("pagerank")), "--trials", "5", "--budget", "50")
    assert r.exit_code == 1
    assert "overall: Fail" in r.output and "SideDivergence" in r.output


def test_manifest_error_exit_code(tmp_path):
    bad = tmp_path / "x.chain.json"
    bad.write_text('{"programs": []}')
    r = invoke("check", str(bad))
    assert r.exit_code == 2 and "manifest error: programs" in r.output


def test_rules_listing():
    r = invoke("rules")
    assert r.exit_code == 0
    for name in rule_names():
        assert name in r.output


def test_run_program():
    r = invoke("run", LISTING_1, "--args", "[[1],[0]], 1/2, 1")
    assert r.exit_code == 0 and r.output.strip() == "[1/2, 1/2]"
    r = invoke("run", LISTING_9, "--args", "[[1, 2], [2], [0]], 1/2, 2")
    assert r.exit_code == 0 and r.output.strip() == "[3/8, 1/4, 3/8]"  # agrees with pagerank_reference


def test_run_runtime_error_and_divergence():
    r = invoke("run", LISTING_1, "--args", "[[3]], 1/2, 1")
    assert r.exit_code == 1 and "IndexOOB" in r.output
    r = invoke("run", LISTING_1, "--args", "[[0]], 1/2, 1000", "--budget", "200")
    assert r.exit_code == 1 and r.output.startswith("diverged after")


def test_run_bad_arguments():
    assert invoke("run", LISTING_1, "--args", "[[0]], 1/2").exit_code == 2
    assert invoke("run", LISTING_1, "--args", "[[0]], true, 1").exit_code == 2
    assert invoke("run", LISTING_1, "--args", "[[0]], 1/2, [1][5]").exit_code == 2
    assert invoke("run", LISTING_1, "--args", "[[0]], 1/2, (").exit_code == 2


def test_translate():
    r = invoke("translate", LISTING_9)
    assert r.exit_code == 0
    first = r.output.splitlines()[0]
    assert first == "pageRank : [[Int]] -> Rat -> Int -> [Rat]"
    assert "reduceByKey" in r.output and "iter" in r.output


def test_bad_program_file(tmp_path):
    src = tmp_path / "bad.il"
    src.write_text("fn f(n: Int) { return n + true; }")
    assert invoke("translate", str(src)).exit_code == 2
    assert invoke("translate", str(tmp_path / "missing.il")).exit_code != 0
