"""CSV reading and writing with exact float round-trip.

Floats are written with ``repr`` (the shortest string that parses back to the
same double) and a ``.`` decimal separator regardless of locale.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

__all__ = ["CsvFormatError", "LabeledTable", "format_value", "write_rows", "read_rows", "read_table"]


class CsvFormatError(ValueError):
    """Malformed input CSV; the message names the offending row and column."""


def format_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "nan"
        return repr(v)
    return str(v)


def write_rows(path, columns, rows) -> None:
    """Write dict rows with a fixed column order."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([format_value(row[c]) for c in columns])


def read_rows(path) -> tuple[list[str], list[list[str]]]:
    """Header and raw string rows; blank lines are skipped."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise CsvFormatError(f"{path}: file is empty") from None
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CsvFormatError(f"{path}: line {lineno} has {len(row)} fields, header has {len(header)}")
            rows.append(row)
    return header, rows


def _parse_float(cell, path, lineno, col):
    try:
        return float(cell)
    except ValueError:
        raise CsvFormatError(f"{path}: line {lineno}, column {col!r}: {cell!r} is not a number") from None


def _parse_label(cell, path, lineno):
    try:
        v = float(cell)
    except ValueError:
        v = None
    if v not in (1.0, 2.0):
        raise CsvFormatError(f"{path}: line {lineno}, column 'label': label must be 1 or 2, got {cell!r}")
    return int(v)


@dataclass
class LabeledTable:
    features: list
    values: np.ndarray
    labels: np.ndarray | None
    ids: list

    def class_split(self):
        """``(x, y)``: rows labelled 1 and rows labelled 2."""
        if self.labels is None:
            raise CsvFormatError("table has no label column")
        return self.values[self.labels == 1], self.values[self.labels == 2]


def read_table(path, require_label: bool = False, features: list | None = None) -> LabeledTable:
    """Read a feature table.

    An optional ``label`` column (values 1 or 2) and an optional ``id``
    column are recognized; every other column is a numeric feature. When
    ``features`` is given the table must contain exactly those feature
    columns, and they are returned in that order.
    """
    header, rows = read_rows(path)
    if len(set(header)) != len(header):
        raise CsvFormatError(f"{path}: duplicate column names in header")
    has_label = "label" in header
    if require_label and not has_label:
        raise CsvFormatError(f"{path}: missing required 'label' column")
    feat = [h for h in header if h not in ("label", "id")]
    if features is not None:
        missing = [f for f in features if f not in feat]
        extra = [f for f in feat if f not in features]
        if missing or extra:
            raise CsvFormatError(f"{path}: feature columns do not match training data (missing {missing}, unexpected {extra})")
        feat = list(features)
    if not feat:
        raise CsvFormatError(f"{path}: no feature columns")
    if not rows:
        raise CsvFormatError(f"{path}: no data rows")
    pos = {h: i for i, h in enumerate(header)}
    vals = np.empty((len(rows), len(feat)))
    labels = np.empty(len(rows), dtype=int) if has_label else None
    ids = []
    for r, row in enumerate(rows):
        lineno = r + 2
        for c, name in enumerate(feat):
            vals[r, c] = _parse_float(row[pos[name]], path, lineno, name)
        if has_label:
            labels[r] = _parse_label(row[pos["label"]], path, lineno)
        ids.append(row[pos["id"]] if "id" in pos else str(r))
    if not np.isfinite(vals).all():
        r, c = np.argwhere(~np.isfinite(vals))[0]
        raise CsvFormatError(f"{path}: line {r + 2}, column {feat[c]!r}: non-finite value")
    return LabeledTable(feat, vals, labels, ids)
