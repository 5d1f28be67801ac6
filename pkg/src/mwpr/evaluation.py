"""Evaluation protocol: retrieval transcripts, annotation scoring, and
inter-annotator agreement.

The protocol: sample query problems, retrieve top-k from both the tree
matcher and the lexical baseline with self-exclusion on, have two
annotators label each recommendation as duplicate (1) or not (0), then
report per-system accuracy and Cohen's kappa. Where human annotators are
unavailable the harness supports oracle labeling (label = signature
equality) over synthetic corpora with planted duplicates.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import vectorsim
from .corpus import IndexedCorpus, MWPRecord, parse_problem
from .errors import (
    ExpressionError,
    InsufficientDataError,
    MalformedJsonError,
    NoEntriesError,
)
from .matching import signature
from .retrieval import query

SYSTEM_TREE = "tree"
SYSTEM_VECTORSIM = "vectorsim"
LABEL_SOURCES = ("A", "B", "consensus")


@dataclass(frozen=True)
class AnnotationEntry:
    query_id: str
    result_id: str
    system: str
    label_a: int
    label_b: int


@dataclass
class AnnotationSet:
    entries: list[AnnotationEntry]

    def __post_init__(self) -> None:
        seen: set[tuple[str, str, str]] = set()
        for e in self.entries:
            if e.label_a not in (0, 1) or e.label_b not in (0, 1):
                raise ValueError(
                    f"labels must be 0 or 1, got ({e.label_a}, {e.label_b}) "
                    f"for ({e.query_id}, {e.result_id}, {e.system})")
            key = (e.query_id, e.result_id, e.system)
            if key in seen:
                raise ValueError(f"duplicate annotation entry {key}")
            seen.add(key)


def run_protocol(corpus: IndexedCorpus, queries: Sequence[MWPRecord],
                 systems: Sequence[str] = (SYSTEM_TREE, SYSTEM_VECTORSIM),
                 k: int = 3) -> list[dict]:
    """Retrieve top-k for every query under every system, self-exclusion on.

    Returns transcript rows ``{"queryId", "system", "rank", "resultId",
    "score"}`` in query order; a query whose equation will not parse yields
    one ``{"queryId", "system", "skipped": true, "error"}`` row for the
    tree system and normal rows for the text-only baseline.
    """
    if not queries:
        raise ValueError("queries must be nonempty")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    model = None
    if SYSTEM_VECTORSIM in systems:
        model = vectorsim.fit({rec.id: rec.text
                               for rec in corpus.records.values()})
    rows: list[dict] = []
    for record in queries:
        for system in systems:
            if system == SYSTEM_TREE:
                try:
                    tree = parse_problem(record)
                except ExpressionError as err:
                    rows.append({"queryId": record.id, "system": system,
                                 "skipped": True, "error": str(err)})
                    continue
                results = query(corpus, tree, record.text, k=k,
                                exclude_id=record.id)
                rows.extend({"queryId": record.id, "system": system,
                             "rank": res.rank, "resultId": res.problem_id,
                             "score": res.lex_score}
                            for res in results)
            elif system == SYSTEM_VECTORSIM:
                ranked = vectorsim.query_vector(model, record.text, k,
                                                exclude_id=record.id)
                rows.extend({"queryId": record.id, "system": system,
                             "rank": rank, "resultId": doc_id, "score": score}
                            for rank, (doc_id, score) in enumerate(ranked, 1))
            else:
                raise ValueError(f"unknown system {system!r}")
    return rows


def write_transcript(rows: Iterable[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def load_annotations_csv(path: str | Path) -> AnnotationSet:
    """CSV with header queryId,resultId,system,labelA,labelB."""
    entries: list[AnnotationEntry] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"queryId", "resultId", "system", "labelA", "labelB"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise MalformedJsonError(
                f"{path}: annotation CSV must carry header "
                "queryId,resultId,system,labelA,labelB")
        for row in reader:
            entries.append(AnnotationEntry(
                query_id=row["queryId"], result_id=row["resultId"],
                system=row["system"],
                label_a=int(row["labelA"]), label_b=int(row["labelB"])))
    return AnnotationSet(entries)


def accuracy(annotations: AnnotationSet, system: str,
             label_source: str = "consensus") -> float:
    """Percent of positively labeled recommendations for one system.

    Consensus counts an entry positive only when both annotators agree
    on 1; "A" and "B" take a single annotator's labels.
    """
    if label_source not in LABEL_SOURCES:
        raise ValueError(f"label_source must be one of {LABEL_SOURCES}")
    entries = [e for e in annotations.entries if e.system == system]
    if not entries:
        raise NoEntriesError(f"no annotation entries for system {system!r}")
    if label_source == "A":
        positives = sum(e.label_a for e in entries)
    elif label_source == "B":
        positives = sum(e.label_b for e in entries)
    else:
        positives = sum(1 for e in entries if e.label_a == 1 and e.label_b == 1)
    return 100.0 * positives / len(entries)


def cohens_kappa(annotations: AnnotationSet) -> float:
    """Chance-corrected agreement between the two annotators.

    kappa = (p_o - p_e) / (1 - p_e) over the 2x2 label table; the
    degenerate all-same-label case (p_e = 1, forcing p_o = 1) returns 1.0.
    """
    entries = annotations.entries
    if len(entries) < 2:
        raise InsufficientDataError(
            f"kappa needs at least 2 entries, got {len(entries)}")
    n = len(entries)
    p_observed = sum(1 for e in entries if e.label_a == e.label_b) / n
    p_a1 = sum(e.label_a for e in entries) / n
    p_b1 = sum(e.label_b for e in entries) / n
    p_expected = p_a1 * p_b1 + (1 - p_a1) * (1 - p_b1)
    if p_expected == 1.0:
        return 1.0
    return (p_observed - p_expected) / (1 - p_expected)


def oracle_annotations(corpus: IndexedCorpus, transcript: Iterable[dict]
                       ) -> AnnotationSet:
    """Label transcript rows with the structural oracle.

    Both annotator columns get label 1 iff the result's signature equals
    the query's — ground truth on synthetic corpora where signatures are
    planted. Skip rows pass through unlabeled (dropped).
    """
    signatures: dict[str, str] = {}
    for sig, ids in corpus.buckets.items():
        for rec_id in ids:
            signatures[rec_id] = sig
    entries = []
    for row in transcript:
        if row.get("skipped"):
            continue
        match = signatures.get(row["queryId"]) == signatures.get(row["resultId"])
        label = 1 if match else 0
        entries.append(AnnotationEntry(
            query_id=row["queryId"], result_id=row["resultId"],
            system=row["system"], label_a=label, label_b=label))
    return AnnotationSet(entries)


def precision_at_k(annotations: AnnotationSet, system: str,
                   label_source: str = "consensus") -> float:
    """Fraction (0..1) of positive labels for a system — accuracy / 100."""
    return accuracy(annotations, system, label_source) / 100.0


@dataclass
class EvalReport:
    label_source: str
    kappa: float | None
    per_system: dict[str, dict[str, float]]
    counts: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "labelSource": self.label_source,
            "kappa": self.kappa,
            "systems": self.per_system,
            "counts": self.counts,
        }


def build_report(annotations: AnnotationSet,
                 label_source: str = "consensus") -> EvalReport:
    systems = sorted({e.system for e in annotations.entries})
    per_system = {
        system: {
            "accuracy": accuracy(annotations, system, label_source),
            "accuracyA": accuracy(annotations, system, "A"),
            "accuracyB": accuracy(annotations, system, "B"),
            "entries": sum(1 for e in annotations.entries if e.system == system),
        }
        for system in systems
    }
    try:
        kappa = cohens_kappa(annotations)
    except InsufficientDataError:
        kappa = None
    return EvalReport(label_source=label_source, kappa=kappa,
                      per_system=per_system,
                      counts={"entries": len(annotations.entries)})


def format_report_table(report: EvalReport) -> str:
    """Aligned plain-text accuracy table, one row per system."""
    header = f"{'Method':<12} {'Accuracy (%)':>12}"
    lines = [header, "-" * len(header)]
    for system, stats in report.per_system.items():
        lines.append(f"{system:<12} {stats['accuracy']:>12.2f}")
    kappa = "n/a" if report.kappa is None else f"{report.kappa:.3f}"
    lines.append(f"label source: {report.label_source}; Cohen's kappa: {kappa}")
    return "\n".join(lines)
