"""Atomic CSV and manifest writers."""

from __future__ import annotations

import datetime as _dt
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def format_value(value) -> str:
    """17 significant digits for floats, so values round-trip exactly."""
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_atomic(path: Path, text: str) -> None:
    """Write to a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    write_atomic(path, csv_text(header, rows))


def write_manifest(path: Path, entries: Sequence[str], now: _dt.datetime | None = None) -> None:
    """Manifest whose only run-dependent line is the leading timestamp."""
    now = now or _dt.datetime.now(_dt.timezone.utc)
    lines = [f"# generated {now.isoformat(timespec='seconds')}", *entries]
    write_atomic(path, "\n".join(lines) + "\n")
