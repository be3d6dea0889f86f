"""Adapter layer: parse event batches from HTTP or files and append them to a store.

Each event is accepted or rejected independently; the whole batch commits
as one store append so concurrent readers never observe part of it.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import EngineError, IssueReport
from .model import LearningEvent, parse_event_document, validate_event

FORMAT_LINES = "lines"
FORMAT_TABLE = "table"

#: Column order expected in delimited-table files; 1:1 with the wire fields,
#: attributes carried as one JSON-encoded column.
TABLE_HEADER = ["id", "user", "timestamp", "source", "platform", "action", "category", "attributes"]


@dataclass
class IngestReport:
    """Outcome of one batch: accepted + rejected always equals the batch size."""

    accepted: int = 0
    rejected: int = 0
    rejections: list[tuple[int, IssueReport]] = field(default_factory=list)

    def reject(self, index: int, report: IssueReport) -> None:
        self.rejected += 1
        self.rejections.append((index, report))

    def to_doc(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": self.rejected,
            "rejections": [
                {"index": i, "issues": r.to_doc()} for i, r in self.rejections
            ],
        }


def ingest_batch(batch: Iterable[Any], store) -> IngestReport:
    """Validate raw event documents and append the valid ones to *store*.

    Duplicates (an event_id already stored, or repeated within the batch)
    are rejected.  The append is atomic: either every accepted event becomes
    visible together or, if the store fails, none do (StoreUnavailable).
    """
    report = IngestReport()
    accepted: list[LearningEvent] = []
    seen_ids: set[str] = set()
    for index, doc in enumerate(batch):
        parsed = parse_event_document(doc)
        if isinstance(parsed, IssueReport):
            report.reject(index, parsed)
            continue
        checked = validate_event(parsed, store.schemas)
        if isinstance(checked, IssueReport):
            report.reject(index, checked)
            continue
        if parsed.event_id in seen_ids or store.contains(parsed.event_id):
            dup = IssueReport()
            dup.add("Duplicate", f"event id {parsed.event_id!r} already stored", field="id")
            report.reject(index, dup)
            continue
        seen_ids.add(parsed.event_id)
        accepted.append(parsed)

    store.append(accepted)  # raises EngineError(StoreUnavailable) on failure
    report.accepted = len(accepted)
    return report


def parse_event_file(path: str, format: str) -> list[tuple[int, Any | IssueReport]]:
    """Read an event file into (index, document-or-report) pairs.

    Malformed lines become per-item issue reports so they count as
    rejections downstream instead of aborting the file.  Blank lines are
    skipped.  Raises EngineError(UnreadableFile) if the file cannot be read
    or the format is unknown.
    """
    if format not in (FORMAT_LINES, FORMAT_TABLE):
        raise EngineError("UnreadableFile", f"unsupported format {format!r}")
    try:
        with open(path, "r", encoding="utf-8-sig") as fh:
            text = fh.read()
    except OSError as e:
        raise EngineError("UnreadableFile", f"cannot read {path}: {e}") from e

    items: list[tuple[int, Any | IssueReport]] = []
    if format == FORMAT_LINES:
        index = 0
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                items.append((index, json.loads(line)))
            except json.JSONDecodeError as e:
                bad = IssueReport()
                bad.add("MalformedLine", f"line {lineno}: {e.msg}")
                items.append((index, bad))
            index += 1
        return items

    reader = csv.reader(text.splitlines())
    try:
        header = next(reader)
    except StopIteration:
        return []
    if [h.strip() for h in header] != TABLE_HEADER:
        raise EngineError(
            "UnreadableFile",
            f"delimited-table header must be {','.join(TABLE_HEADER)}",
        )
    for index, row in enumerate(reader):
        lineno = index + 2
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(TABLE_HEADER):
            bad = IssueReport()
            bad.add("MalformedLine", f"line {lineno}: expected {len(TABLE_HEADER)} columns, got {len(row)}")
            items.append((index, bad))
            continue
        doc = dict(zip(TABLE_HEADER[:-1], row[:-1]))
        attrs_text = row[-1].strip()
        if attrs_text:
            try:
                doc["attributes"] = json.loads(attrs_text)
            except json.JSONDecodeError as e:
                bad = IssueReport()
                bad.add("MalformedLine", f"line {lineno}: attributes column: {e.msg}")
                items.append((index, bad))
                continue
        else:
            doc["attributes"] = {}
        items.append((index, doc))
    return items


def ingest_file(path: str, format: str, store) -> IngestReport:
    """Ingest a document-lines or delimited-table file; equivalent to
    ingest_batch over the parsed contents."""
    items = parse_event_file(path, format)
    docs = [doc for _, doc in items if not isinstance(doc, IssueReport)]
    batch_report = ingest_batch(docs, store)

    # Re-index batch rejections back onto file positions, then add parse failures.
    doc_positions = [i for i, doc in items if not isinstance(doc, IssueReport)]
    report = IngestReport(accepted=batch_report.accepted)
    for batch_index, issues in batch_report.rejections:
        report.reject(doc_positions[batch_index], issues)
    for i, doc in items:
        if isinstance(doc, IssueReport):
            report.reject(i, doc)
    report.rejections.sort(key=lambda pair: pair[0])
    return report
