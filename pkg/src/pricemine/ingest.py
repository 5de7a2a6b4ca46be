"""Strict file ingestion for classified listings.

Two formats are supported:

* CSV with RFC-4180 quoting and a header naming the seven fields
  ``title, description, beds, baths, size, location, price`` in any order
  (header matching is case-insensitive).
* JSON Lines with one object per line carrying exactly those seven keys in
  lower case.

Rows that fail validation are skipped and logged in the returned
:class:`IngestReport`; a missing header column aborts the whole file.
Invalid UTF-8 rejects the offending row, not the file.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MissingColumnError
from .records import ClassifiedRecord

FIELD_NAMES = ("title", "description", "beds", "baths", "size", "location", "price")
_INT_FIELDS = ("beds", "baths", "size", "price")
_TEXT_FIELDS = ("title", "description", "location")


@dataclass(slots=True)
class IngestReport:
    """Outcome of one file ingestion; accepted + rejected = total data rows."""

    accepted: int = 0
    rejected: int = 0
    rejection_reasons: list[tuple[int, str]] = field(default_factory=list)

    def reject(self, line: int, reason: str) -> None:
        self.rejected += 1
        self.rejection_reasons.append((line, reason))


def _build_record(values: dict[str, object], line: int, report: IngestReport) -> ClassifiedRecord | None:
    """Validate one row's field values; returns None (and logs) on failure."""
    parsed: dict[str, object] = {}
    for name in _TEXT_FIELDS:
        value = values[name]
        if not isinstance(value, str):
            report.reject(line, f"non-text {name}")
            return None
        parsed[name] = value
    for name in _INT_FIELDS:
        value = values[name]
        if isinstance(value, bool) or not isinstance(value, int):
            report.reject(line, f"non-integer {name}")
            return None
        if value < 0:
            report.reject(line, f"negative {name}")
            return None
        parsed[name] = value
    if not str(parsed["location"]).strip():
        report.reject(line, "empty location")
        return None
    try:
        record = ClassifiedRecord(**parsed)  # type: ignore[arg-type]
    except ValueError as exc:
        report.reject(line, str(exc))
        return None
    report.accepted += 1
    return record


def _decode_lines(path: Path) -> list[tuple[int, str | None]]:
    """Physical lines as (1-based number, text); None marks bad UTF-8."""
    raw = path.read_bytes()
    lines: list[tuple[int, str | None]] = []
    for number, chunk in enumerate(raw.splitlines(), start=1):
        try:
            lines.append((number, chunk.decode("utf-8")))
        except UnicodeDecodeError:
            lines.append((number, None))
    return lines


def read_csv(path: str | Path) -> tuple[list[ClassifiedRecord], IngestReport]:
    """Parse a listings CSV file.

    Raises :class:`MissingColumnError` when the header lacks a required
    column. A zero-byte file is treated as an empty dataset. Extra columns
    are ignored.
    """
    path = Path(path)
    report = IngestReport()
    # Decode up front so a row with invalid bytes is rejected on its own.
    text = path.read_bytes().decode("utf-8", errors="surrogateescape")
    if not text.strip():
        return [], report

    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        return [], report
    column_of: dict[str, int] = {}
    for index, name in enumerate(header):
        column_of.setdefault(name.strip().lower(), index)
    missing = [name for name in FIELD_NAMES if name not in column_of]
    if missing:
        raise MissingColumnError(f"{path}: header is missing column(s): {', '.join(missing)}")

    records: list[ClassifiedRecord] = []
    for row in reader:
        line = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if any("\udc80" <= ch <= "\udcff" for cell in row for ch in cell):
            report.reject(line, "invalid UTF-8")
            continue
        if len(row) <= max(column_of[name] for name in FIELD_NAMES):
            report.reject(line, "too few fields")
            continue
        values: dict[str, object] = {}
        bad_int: str | None = None
        for name in _TEXT_FIELDS:
            values[name] = row[column_of[name]]
        for name in _INT_FIELDS:
            cell = row[column_of[name]].strip()
            try:
                values[name] = int(cell)
            except ValueError:
                bad_int = name
                break
        if bad_int is not None:
            report.reject(line, f"non-integer {bad_int}")
            continue
        record = _build_record(values, line, report)
        if record is not None:
            records.append(record)
    return records, report


def read_jsonl(path: str | Path) -> tuple[list[ClassifiedRecord], IngestReport]:
    """Parse a JSON Lines listings file; blank lines are skipped silently."""
    path = Path(path)
    report = IngestReport()
    records: list[ClassifiedRecord] = []
    for line_number, text in _decode_lines(path):
        if text is None:
            report.reject(line_number, "invalid UTF-8")
            continue
        if not text.strip():
            continue
        try:
            payload = json.loads(text)
        except json.JSONDecodeError:
            report.reject(line_number, "invalid JSON")
            continue
        if not isinstance(payload, dict):
            report.reject(line_number, "not a JSON object")
            continue
        missing = [name for name in FIELD_NAMES if name not in payload]
        if missing:
            report.reject(line_number, f"missing key: {missing[0]}")
            continue
        values = {name: payload[name] for name in FIELD_NAMES}
        record = _build_record(values, line_number, report)
        if record is not None:
            records.append(record)
    return records, report


def write_csv(records: list[ClassifiedRecord], path: str | Path) -> None:
    """Write records in the canonical column order with RFC-4180 quoting."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(FIELD_NAMES)
        for record in records:
            writer.writerow(
                [
                    record.title,
                    record.description,
                    record.beds,
                    record.baths,
                    record.size,
                    record.location,
                    record.price,
                ]
            )
