"""Shipped IL programs, chain manifests and an independent PageRank oracle."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

CORPUS_DIR = Path(__file__).resolve().parent / "v1"

_NOTES = {
    "pagerank/listing-1": "PageRank with nested index loops (imperative original)",
    "pagerank/listing-2": "contribution loop rewritten as a map",
    "pagerank/listing-3": "ranks zipped with links before distributing",
    "pagerank/listing-4": "index loop over outRanks replaced by element loop",
    "pagerank/listing-5": "contributions materialized per page",
    "pagerank/listing-6": "nested loops flattened through concat",
    "pagerank/listing-7": "concat of map written as flatMap",
    "pagerank/listing-8": "accumulation split into group and per-key fold",
    "pagerank/listing-9": "group and fold written as reduceByKey",
    "sumarrays/plain": "element-wise sum indexing both arrays",
    "sumarrays/zipped": "element-wise sum through zip",
}
_CHAINS = ("pagerank", "sumarrays")


class CorpusError(KeyError):
    pass


@dataclass(frozen=True)
class CorpusEntry:
    id: str
    source: str
    note: str
    path: Path


def program_ids() -> list:
    return list(_NOTES)


def get_program(program_id: str) -> CorpusEntry:
    if program_id not in _NOTES:
        raise CorpusError(f"unknown corpus program {program_id!r}")
    path = CORPUS_DIR / f"{program_id}.il"
    return CorpusEntry(program_id, path.read_text(encoding="utf-8"), _NOTES[program_id], path)


def chain_path(name: str) -> Path:
    if name not in _CHAINS:
        raise CorpusError(f"unknown chain {name!r}; known chains: {', '.join(_CHAINS)}")
    return CORPUS_DIR / f"{name}.chain.json"


def get_chain(name: str):
    from ..chain import load_manifest
    return load_manifest(chain_path(name))


# -- PageRank oracle ------------------------------------------------------------

@dataclass(frozen=True)
class PageRankInput:
    links: tuple
    dampening: Fraction
    iterations: int

    def validate(self) -> None:
        n = len(self.links)
        if n == 0:
            raise ValueError("a graph needs at least one page")
        for page, targets in enumerate(self.links):
            if not targets:
                raise ValueError(f"page {page} has no outgoing links")
            for t in targets:
                if not 0 <= t < n:
                    raise ValueError(f"page {page} links to {t}, outside 0..{n - 1}")
        if not 0 < self.dampening < 1:
            raise ValueError("dampening must lie strictly between 0 and 1")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")


def pagerank_trace(inp: PageRankInput):
    """Ranks for k = 0..iterations and the incoming mass Δ_k for k >= 1.

    Edges are treated as a multiset ``(o, p)``; Δ_k(p) pulls from every page
    ``o`` that links to ``p``.
    """
    inp.validate()
    links = inp.links
    n = len(links)
    d = Fraction(inp.dampening)
    edges = [(o, p) for o, targets in enumerate(links) for p in targets]
    ranks = [[Fraction(1, n)] * n]
    deltas = []
    for _ in range(inp.iterations):
        prev = ranks[-1]
        delta = [sum((prev[o] / len(links[o]) for o, q in edges if q == p), Fraction(0))
                 for p in range(n)]
        deltas.append(delta)
        ranks.append([d * delta[p] + (1 - d) / n for p in range(n)])
    return ranks, deltas


def pagerank_reference(inp: PageRankInput) -> list:
    return pagerank_trace(inp)[0][-1]
