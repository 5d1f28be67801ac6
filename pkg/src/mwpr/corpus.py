"""Problem repository: dataset ingestion, index construction, persistence.

The native interchange format is JSONL with one problem per line
(``{"id", "text", "equation", "source", "solution"}``); a converter accepts
MAWPS-style JSON arrays. ``build_index`` parses every record once and
buckets ids by canonical signature — retrieval afterwards is a hash lookup.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import (
    DuplicateIdError,
    ExpressionError,
    MalformedIndexFileError,
    MalformedJsonError,
    VersionMismatchError,
)
from .expr import ExprTree, parse_equation
from .matching import signature

INDEX_FORMAT_VERSION = 1

_NUMERAL = re.compile(r"\d+\.\d+|\.\d+|\d+")
_WORD = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class MWPRecord:
    """One math word problem."""

    id: str
    text: str
    equation: str
    text_numbers: tuple[float, ...] = ()
    source: str = "user"
    solution: float | None = None


def extract_text_numbers(text: str) -> tuple[float, ...]:
    """Decimal numerals scanned from the text, in order of appearance."""
    return tuple(float(m) for m in _NUMERAL.findall(text))


def word_tokens(text: str) -> list[str]:
    """Lowercased alphanumeric word split shared by all lexical scoring."""
    return _WORD.findall(text.lower())


def make_record(id: str, text: str, equation: str, source: str = "user",
                solution: float | None = None) -> MWPRecord:
    """Build a record, deriving its text-number list from the text."""
    if not text:
        raise MalformedJsonError(f"record {id!r} has empty text")
    return MWPRecord(id=id, text=text, equation=equation,
                     text_numbers=extract_text_numbers(text),
                     source=source, solution=solution)


def parse_problem(record: MWPRecord) -> ExprTree:
    """Parse one record's equation against its text numbers."""
    return parse_equation(record.equation, record.text_numbers,
                          record_id=record.id)


@dataclass
class CorpusStats:
    total: int
    indexed: int
    failed: int
    buckets: int
    largest_bucket: int


@dataclass
class IndexedCorpus:
    """Immutable snapshot of the indexed repository.

    ``buckets`` maps canonical signature to problem ids in ingestion order;
    ``failures`` keeps (id, message) for records whose equation would not
    parse — those stay in ``records`` so they can still be served by id.
    ``word_sets`` is derived at build time and never persisted.
    """

    records: dict[str, MWPRecord] = field(default_factory=dict)
    buckets: dict[str, list[str]] = field(default_factory=dict)
    failures: list[tuple[str, str]] = field(default_factory=list)
    word_sets: dict[str, frozenset[str]] = field(default_factory=dict)

    def stats(self) -> CorpusStats:
        indexed = sum(len(ids) for ids in self.buckets.values())
        return CorpusStats(
            total=len(self.records),
            indexed=indexed,
            failed=len(self.failures),
            buckets=len(self.buckets),
            largest_bucket=max((len(ids) for ids in self.buckets.values()),
                               default=0),
        )

    def signature_of(self, record_id: str) -> str | None:
        for sig, ids in self.buckets.items():
            if record_id in ids:
                return sig
        return None


def build_index(records: Iterable[MWPRecord]) -> IndexedCorpus:
    """Parse and bucket every record; per-record failures never abort."""
    corpus = IndexedCorpus()
    for record in records:
        if record.id in corpus.records:
            raise DuplicateIdError(f"duplicate problem id {record.id!r}")
        corpus.records[record.id] = record
        corpus.word_sets[record.id] = frozenset(word_tokens(record.text))
        try:
            tree = parse_problem(record)
        except ExpressionError as err:
            corpus.failures.append((record.id, str(err)))
            continue
        corpus.buckets.setdefault(signature(tree), []).append(record.id)
    return corpus


def add_record(corpus: IndexedCorpus, record: MWPRecord
               ) -> tuple[IndexedCorpus, str | None]:
    """Copy-on-write insertion of one record.

    Returns the new snapshot and the parse failure message if the record
    could not be indexed (it is stored either way).
    """
    if record.id in corpus.records:
        raise DuplicateIdError(f"duplicate problem id {record.id!r}")
    updated = IndexedCorpus(
        records={**corpus.records, record.id: record},
        buckets={sig: list(ids) for sig, ids in corpus.buckets.items()},
        failures=list(corpus.failures),
        word_sets={**corpus.word_sets,
                   record.id: frozenset(word_tokens(record.text))},
    )
    try:
        tree = parse_problem(record)
    except ExpressionError as err:
        updated.failures.append((record.id, str(err)))
        return updated, str(err)
    updated.buckets.setdefault(signature(tree), []).append(record.id)
    return updated, None


# --- dataset ingestion -------------------------------------------------

def read_jsonl(path: str | Path) -> list[MWPRecord]:
    """Native JSONL corpus: one record object per line, blank lines skipped."""
    records: list[MWPRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise MalformedJsonError(f"{path}:{lineno}: {err}") from err
            records.append(_record_from_obj(obj, f"{path}:{lineno}", seen))
    return records


def read_mawps(path: str | Path) -> list[MWPRecord]:
    """MAWPS-style JSON array (sQuestion / lEquations / lSolutions / iIndex).

    Records with multiple equations take the first.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as err:
            raise MalformedJsonError(f"{path}: {err}") from err
    if not isinstance(data, list):
        raise MalformedJsonError(f"{path}: expected a JSON array of problems")
    records: list[MWPRecord] = []
    seen: set[str] = set()
    for i, obj in enumerate(data):
        if not isinstance(obj, dict):
            raise MalformedJsonError(f"{path}[{i}]: expected an object")
        text = obj.get("sQuestion")
        if not isinstance(text, str) or not text:
            raise MalformedJsonError(f"{path}[{i}]: missing question text")
        equations = obj.get("lEquations") or []
        if not equations:
            raise MalformedJsonError(f"{path}[{i}]: missing equation list")
        solutions = obj.get("lSolutions") or []
        solution = float(solutions[0]) if solutions else None
        rec_id = str(obj.get("iIndex", i))
        if rec_id in seen:
            raise DuplicateIdError(f"{path}[{i}]: duplicate problem id {rec_id!r}")
        seen.add(rec_id)
        records.append(make_record(rec_id, text, str(equations[0]),
                                   source="mawps", solution=solution))
    return records


def load_records(path: str | Path, fmt: str = "auto") -> list[MWPRecord]:
    """Load a dataset, sniffing MAWPS-array vs native JSONL when fmt='auto'."""
    if fmt == "auto":
        with open(path, encoding="utf-8") as fh:
            head = fh.read(512).lstrip()
        fmt = "mawps" if head.startswith("[") else "jsonl"
    if fmt == "mawps":
        return read_mawps(path)
    if fmt == "jsonl":
        return read_jsonl(path)
    raise ValueError(f"unknown corpus format {fmt!r}")


def write_jsonl(records: Sequence[MWPRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps({
                "id": rec.id,
                "text": rec.text,
                "equation": rec.equation,
                "source": rec.source,
                "solution": rec.solution,
            }, ensure_ascii=False) + "\n")


def _record_from_obj(obj: object, where: str, seen: set[str]) -> MWPRecord:
    if not isinstance(obj, dict):
        raise MalformedJsonError(f"{where}: expected an object")
    for key in ("id", "text", "equation"):
        if not isinstance(obj.get(key), str) or not obj[key].strip():
            raise MalformedJsonError(f"{where}: missing or empty {key!r}")
    rec_id = obj["id"]
    if rec_id in seen:
        raise DuplicateIdError(f"{where}: duplicate problem id {rec_id!r}")
    seen.add(rec_id)
    solution = obj.get("solution")
    if solution is not None and not isinstance(solution, (int, float)):
        raise MalformedJsonError(f"{where}: solution must be a number or null")
    return make_record(rec_id, obj["text"], obj["equation"],
                       source=obj.get("source", "user"),
                       solution=None if solution is None else float(solution))


# --- index persistence --------------------------------------------------

def save_index(corpus: IndexedCorpus, path: str | Path) -> None:
    """Versioned JSON dump; ``load_index`` restores it losslessly."""
    doc = {
        "version": INDEX_FORMAT_VERSION,
        "records": [_record_to_json(r) for r in corpus.records.values()],
        "buckets": corpus.buckets,
        "failures": [[rec_id, message] for rec_id, message in corpus.failures],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, ensure_ascii=False)
        fh.write("\n")


def load_index(path: str | Path) -> IndexedCorpus:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as err:
            raise MalformedIndexFileError(f"{path}: {err}") from err
    if not isinstance(doc, dict):
        raise MalformedIndexFileError(f"{path}: expected a JSON object")
    version = doc.get("version")
    if version != INDEX_FORMAT_VERSION:
        raise VersionMismatchError(
            f"{path}: index version {version!r}, expected {INDEX_FORMAT_VERSION}")
    try:
        records = {}
        for obj in doc["records"]:
            rec = _record_from_json(obj)
            records[rec.id] = rec
        buckets = {str(sig): [str(i) for i in ids]
                   for sig, ids in doc["buckets"].items()}
        failures = [(str(rec_id), str(message))
                    for rec_id, message in doc["failures"]]
    except (KeyError, TypeError, ValueError) as err:
        raise MalformedIndexFileError(f"{path}: {err!r}") from err
    for sig, ids in buckets.items():
        for rec_id in ids:
            if rec_id not in records:
                raise MalformedIndexFileError(
                    f"{path}: bucket {sig!r} references unknown id {rec_id!r}")
    word_sets = {rec_id: frozenset(word_tokens(rec.text))
                 for rec_id, rec in records.items()}
    return IndexedCorpus(records=records, buckets=buckets,
                         failures=failures, word_sets=word_sets)


def _record_to_json(rec: MWPRecord) -> dict:
    return {
        "id": rec.id,
        "text": rec.text,
        "equation": rec.equation,
        "textNumbers": list(rec.text_numbers),
        "source": rec.source,
        "solution": rec.solution,
    }


def _record_from_json(obj: dict) -> MWPRecord:
    return MWPRecord(
        id=str(obj["id"]),
        text=str(obj["text"]),
        equation=str(obj["equation"]),
        text_numbers=tuple(float(x) for x in obj["textNumbers"]),
        source=str(obj.get("source", "user")),
        solution=None if obj.get("solution") is None else float(obj["solution"]),
    )
