from __future__ import annotations

from functools import lru_cache

import pytest

from mrv.corpus import get_program, program_ids
from mrv.gen import Constraints
from mrv.il.typecheck import load_program
from mrv.translate import translate

PAGERANK_INPUTS = Constraints.from_json({"links": "graph", "dampening": "open_unit", "iterations": "counter"})
SUM_INPUTS = Constraints.from_json({"same_length": [["xs", "ys"]]})


@lru_cache(maxsize=None)
def typed(program_id: str):
    entry = get_program(program_id)
    return load_program(entry.source, str(entry.path))


@lru_cache(maxsize=None)
def term(program_id: str):
    return translate(typed(program_id))


def listing(n: int):
    return typed(f"pagerank/listing-{n}")


def listing_term(n: int):
    return term(f"pagerank/listing-{n}")


def constraints_for(program_id: str) -> Constraints:
    return PAGERANK_INPUTS if program_id.startswith("pagerank") else SUM_INPUTS


@pytest.fixture(params=program_ids())
def corpus_id(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
