"""CSV ingestion and number-formatted JSON/CSV output."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .empirical import SeriesSample
from .errors import ConfigError, ParseError

MIN_ROWS = 10
JSON_DIGITS = 10
CSV_DIGITS = 8


def load_series(path, column: Optional[str] = None, as_returns: bool = False,
                min_rows: int = MIN_ROWS) -> SeriesSample:
    """Read one numeric column of a headed CSV file.

    Row numbers in error messages count data rows from 1 (the header is not
    counted). With ``as_returns`` the column is treated as prices and
    converted to log returns ``log(P_t / P_{t-1})``. Fewer than ``min_rows``
    usable values (after differencing) is an error.
    """
    path = Path(path)
    try:
        fh = path.open(newline="")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(f"{path} is empty") from None
        if column is None:
            if len(header) != 1:
                raise ConfigError(f"{path} has columns {header}; choose one with --column")
            col = 0
        elif column in header:
            col = header.index(column)
        else:
            raise ParseError(f"column {column!r} not found in {path} (have {header})")
        values = []
        for row_no, row in enumerate(reader, start=1):
            if not row or all(not c.strip() for c in row):
                continue
            if col >= len(row):
                raise ParseError(f"row {row_no}: missing value for column {header[col]!r}")
            cell = row[col].strip()
            try:
                val = float(cell)
            except ValueError:
                raise ParseError(f"row {row_no}: non-numeric value {cell!r}") from None
            if not math.isfinite(val):
                raise ParseError(f"row {row_no}: non-finite value {cell!r}")
            values.append(val)
    x = np.asarray(values, dtype=float)
    if as_returns:
        if np.any(x <= 0):
            raise ParseError("prices must be positive to form log returns")
        x = np.diff(np.log(x))
    if x.size < max(min_rows, 2):
        raise ParseError(f"only {x.size} usable rows; need at least {min_rows}")
    return SeriesSample(x)


def _round(obj, digits: int = JSON_DIGITS):
    if isinstance(obj, dict):
        return {str(k): _round(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v, digits) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist(), digits)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        val = float(obj)
        if not math.isfinite(val):
            return None
        return float(f"{val:.{digits}g}")
    return obj


def to_json(obj) -> str:
    return json.dumps(_round(obj), indent=2) + "\n"


def to_csv(header: Sequence[str], columns: Iterable) -> str:
    cols = [np.asarray(c) for c in columns]
    lines = [",".join(header)]
    for row in zip(*cols):
        lines.append(",".join(_fmt_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.{CSV_DIGITS}g}"
    return str(v)
