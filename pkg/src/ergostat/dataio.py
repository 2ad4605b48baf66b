"""Sample file ingestion and atomic result writers."""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile

from .cylinder import Sample
from .errors import ConfigError, SampleFormatError


def read_sample(path: str, column: str | None = None) -> Sample:
    """Load a sample from disk.

    Plain-text mode (default): one decimal float per line, blank lines
    ignored.  CSV mode: ``column`` names the header column to read.
    Parse errors report the offending line number.
    """
    if column is None:
        values = []
        with open(path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    v = float(text)
                except ValueError:
                    raise SampleFormatError(
                        path, line_no, f"not a decimal float: {text!r}"
                    ) from None
                if not math.isfinite(v):
                    raise SampleFormatError(path, line_no, f"non-finite value {text}")
                values.append(v)
        return Sample(values)

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or column not in reader.fieldnames:
            raise ConfigError(
                f"{path}: column {column!r} not found in header "
                f"{reader.fieldnames}"
            )
        values = []
        for row in reader:
            cell = row.get(column)
            line_no = reader.line_num
            if cell is None or not cell.strip():
                raise SampleFormatError(path, line_no, f"missing value in {column!r}")
            try:
                v = float(cell)
            except ValueError:
                raise SampleFormatError(
                    path, line_no, f"not a decimal float: {cell!r}"
                ) from None
            if not math.isfinite(v):
                raise SampleFormatError(path, line_no, f"non-finite value {cell}")
            values.append(v)
    return Sample(values)


def write_sample(path: str, sample: Sample):
    """One float per line, round-trippable through :func:`read_sample`."""
    with open(path, "w", encoding="utf-8") as fh:
        for v in sample.values:
            fh.write(f"{v!r}\n")


def _atomic_write(path: str, payload: str):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj):
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")
