"""Lexical TF-IDF cosine-similarity retrieval baseline.

Stands in for semantic-similarity retrieval in comparison runs: it ranks by
surface word overlap and therefore happily recommends problems that look
alike but compute something different — the failure mode the tree matcher
exists to avoid.

idf(t) = ln(N / df(t)) + 1 over raw term counts; stored vectors are
L2-normalized, so cosine is a sparse dot product and lies in [0, 1].
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Mapping

from .corpus import word_tokens
from .errors import EmptyCorpusError


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]          # term -> dimension index
    idf: dict[str, float]
    doc_vectors: dict[str, dict[str, float]]  # id -> L2-normalized sparse vector
    doc_order: list[str]                # ingestion order for tie-breaks
    stop_words: frozenset[str]
    stemmer: Callable[[str], str] | None

    def _terms(self, text: str) -> list[str]:
        terms = word_tokens(text)
        if self.stop_words:
            terms = [t for t in terms if t not in self.stop_words]
        if self.stemmer is not None:
            terms = [self.stemmer(t) for t in terms]
        return terms


def fit(texts: Mapping[str, str], stop_words: frozenset[str] | None = None,
        stemmer: Callable[[str], str] | None = None) -> TfidfModel:
    """Fit the model over id -> text. Both preprocessing hooks default to off."""
    if not texts:
        raise EmptyCorpusError("cannot fit a TF-IDF model on zero documents")
    model = TfidfModel(vocabulary={}, idf={}, doc_vectors={},
                       doc_order=list(texts), stop_words=stop_words or frozenset(),
                       stemmer=stemmer)
    doc_terms = {doc_id: model._terms(text) for doc_id, text in texts.items()}
    df: Counter[str] = Counter()
    for terms in doc_terms.values():
        df.update(set(terms))
    n_docs = len(texts)
    model.vocabulary = {term: dim for dim, term in enumerate(sorted(df))}
    model.idf = {term: math.log(n_docs / count) + 1.0
                 for term, count in df.items()}
    for doc_id, terms in doc_terms.items():
        model.doc_vectors[doc_id] = _normalized_vector(terms, model.idf)
    return model


def query_vector(model: TfidfModel, text: str, k: int,
                 exclude_id: str | None = None) -> list[tuple[str, float]]:
    """Top-k documents by cosine similarity, ingestion-order tie-break.

    Query terms outside the fitted vocabulary are dropped; an all-unseen
    query scores 0 everywhere and ranks purely by tie-break.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    terms = [t for t in model._terms(text) if t in model.vocabulary]
    qvec = _normalized_vector(terms, model.idf)
    scored: list[tuple[float, int, str]] = []
    for position, doc_id in enumerate(model.doc_order):
        if doc_id == exclude_id:
            continue
        dvec = model.doc_vectors[doc_id]
        if len(qvec) > len(dvec):
            small, large = dvec, qvec
        else:
            small, large = qvec, dvec
        score = sum(weight * large.get(term, 0.0)
                    for term, weight in small.items())
        scored.append((score, position, doc_id))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [(doc_id, score) for score, _, doc_id in scored[:k]]


def _normalized_vector(terms: list[str], idf: Mapping[str, float]
                       ) -> dict[str, float]:
    counts = Counter(terms)
    vector = {term: count * idf.get(term, 0.0) for term, count in counts.items()}
    norm = math.sqrt(sum(w * w for w in vector.values()))
    if norm == 0.0:
        return {}
    return {term: w / norm for term, w in vector.items()}
