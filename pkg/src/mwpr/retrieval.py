"""Top-k retrieval of structurally identical problems.

A query resolves to its tree's canonical signature; the matching bucket is
ranked by lexical Jaccard similarity against the query text (ingestion
order breaks ties) and truncated to k. The index snapshot is immutable, so
any number of readers may query concurrently; writers go through
:class:`CorpusStore`, which serializes additions and swaps snapshots
atomically.
"""

from __future__ import annotations

import random
import statistics
import threading
import time
from dataclasses import dataclass

from .corpus import (IndexedCorpus, MWPRecord, add_record,
                     extract_text_numbers, word_tokens)
from .expr import ExprTree, parse_equation
from .matching import signature


@dataclass(frozen=True)
class MatchResult:
    problem_id: str
    rank: int  # 1-based
    lex_score: float
    signature: str


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    """Word-set Jaccard similarity; 0.0 when the union is empty."""
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def query(corpus: IndexedCorpus, query_tree: ExprTree,
          query_text: str | None = None, k: int = 3,
          exclude_id: str | None = None) -> list[MatchResult]:
    """Return at most k problems whose trees match ``query_tree``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    sig = signature(query_tree)
    candidate_ids = corpus.buckets.get(sig, [])
    query_words = frozenset(word_tokens(query_text)) if query_text else frozenset()
    scored: list[tuple[float, int, str]] = []
    for position, rec_id in enumerate(candidate_ids):
        if rec_id == exclude_id:
            continue
        score = jaccard(query_words, corpus.word_sets[rec_id])
        scored.append((score, position, rec_id))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [MatchResult(problem_id=rec_id, rank=rank, lex_score=score,
                        signature=sig)
            for rank, (score, _, rec_id) in enumerate(scored[:k], start=1)]


def parse_query(equation: str, text: str | None = None) -> ExprTree:
    """Parse a query equation under the ad-hoc-query convention.

    Numbers are mapped against the problem text when one is given; an
    equation-only query treats its own numerals as the quantity list, so
    "x = 5 + 6" still lands in the two-variable addition bucket instead of
    degenerating to constants.
    """
    if text:
        text_numbers = extract_text_numbers(text)
    else:
        text_numbers = extract_text_numbers(equation)
    return parse_equation(equation, text_numbers)


def query_raw(corpus: IndexedCorpus, equation: str, text: str | None = None,
              k: int = 3, exclude_id: str | None = None) -> list[MatchResult]:
    """Parse a raw equation via :func:`parse_query` and run :func:`query`."""
    tree = parse_query(equation, text)
    return query(corpus, tree, text, k=k, exclude_id=exclude_id)


@dataclass
class AddOutcome:
    corpus: IndexedCorpus
    indexed: bool
    error: str | None


def add_problem(corpus: IndexedCorpus, record: MWPRecord) -> AddOutcome:
    """Insert one record exactly as build_index would have.

    Unparseable equations land in ``failures`` (the record is still stored
    and retrievable by id); a duplicate id raises DuplicateId.
    """
    updated, error = add_record(corpus, record)
    return AddOutcome(corpus=updated, indexed=error is None, error=error)


class CorpusStore:
    """Single-writer/many-reader holder for the current index snapshot.

    Readers grab ``snapshot`` without locking; writers serialize on a lock
    and publish a fully built snapshot, so a reader sees either the old or
    the new index, never a partial one.
    """

    def __init__(self, corpus: IndexedCorpus):
        self._corpus = corpus
        self._lock = threading.Lock()

    @property
    def snapshot(self) -> IndexedCorpus:
        return self._corpus

    def add(self, record: MWPRecord) -> AddOutcome:
        with self._lock:
            outcome = add_problem(self._corpus, record)
            self._corpus = outcome.corpus
            return outcome


# --- latency benchmark ---------------------------------------------------

@dataclass
class BenchReport:
    queries: int
    k: int
    median_ms: float
    p95_ms: float
    p99_ms: float
    max_ms: float

    def to_dict(self) -> dict:
        return {
            "queries": self.queries,
            "k": self.k,
            "medianMs": self.median_ms,
            "p95Ms": self.p95_ms,
            "p99Ms": self.p99_ms,
            "maxMs": self.max_ms,
        }


def run_bench(corpus: IndexedCorpus, n_queries: int, seed: int,
              k: int = 3) -> BenchReport:
    """Time ``n_queries`` end-to-end queries (parse + lookup + ranking).

    Query problems are drawn from the indexed records with a seeded PRNG,
    excluding themselves from their results, so repeated runs measure the
    identical workload.
    """
    indexed_ids = [rec_id for ids in corpus.buckets.values() for rec_id in ids]
    if not indexed_ids:
        raise ValueError("corpus has no indexed records to benchmark")
    rng = random.Random(seed)
    picks = [corpus.records[rng.choice(indexed_ids)] for _ in range(n_queries)]
    timings_ms: list[float] = []
    for record in picks:
        start = time.perf_counter()
        query_raw(corpus, record.equation, record.text, k=k,
                  exclude_id=record.id)
        timings_ms.append((time.perf_counter() - start) * 1e3)
    timings_ms.sort()
    return BenchReport(
        queries=n_queries,
        k=k,
        median_ms=statistics.median(timings_ms),
        p95_ms=_percentile(timings_ms, 0.95),
        p99_ms=_percentile(timings_ms, 0.99),
        max_ms=timings_ms[-1],
    )


def _percentile(sorted_values: list[float], q: float) -> float:
    index = min(len(sorted_values) - 1, max(0, round(q * len(sorted_values)) - 1))
    return sorted_values[index]
