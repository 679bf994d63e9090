"""Atomic text output and exact float formatting for the CSV/JSON writers."""
from __future__ import annotations

import os
import tempfile
from pathlib import Path

from .errors import OutputError


def fmt(x: float) -> str:
    """17 significant digits: round-trips any double."""
    return f"{float(x):.17g}"


def csv_text(header, rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(v if isinstance(v, str) else (str(v) if isinstance(v, int) else fmt(v)) for v in row))
    return "\n".join(lines) + "\n"


def write_atomic(path, text: str) -> Path:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    return path
