"""
Deterministic serialization: CSV tables, JSON reports, 8-bit graymaps and
flat ``key = value`` configuration files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArgumentError

__all__ = ["format_value", "write_csv", "read_csv", "write_json", "write_pgm", "read_pgm",
           "phase_to_gray", "read_config"]


def format_value(x) -> str:
    """Shortest round-trip text for numbers; ``str`` for everything else."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x + 0.0)  # folds -0.0 into 0.0
    return str(x)


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence],
              comment: str | None = None) -> Path:
    """Write ``# comment``, a header row and the data rows with ``\\n`` line ends."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="\n", encoding="utf-8") as fh:
        if comment is not None:
            fh.write("# " + comment.replace("\n", " ") + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(format_value(v) for v in row) + "\n")
    return path


def read_csv(path: str | Path) -> tuple[list[str], list[list[str]]]:
    """Header and rows of a file written by :func:`write_csv` (comment lines skipped)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8").splitlines() if not ln.startswith("#")]
    return lines[0].split(","), [ln.split(",") for ln in lines[1:]]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: str | Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def phase_to_gray(phase: np.ndarray) -> np.ndarray:
    """Map ``[0, 2π)`` linearly onto ``0 .. 255``."""
    g = np.floor(np.mod(phase, 2 * np.pi) / (2 * np.pi) * 256.0)
    return np.clip(g, 0, 255).astype(np.uint8)


def write_pgm(path: str | Path, gray: np.ndarray) -> Path:
    """Binary (P5) 8-bit portable graymap."""
    gray = np.asarray(gray)
    if gray.ndim != 2 or gray.dtype != np.uint8:
        raise InvalidArgumentError("graymap must be a 2D uint8 array")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows, cols = gray.shape
    path.write_bytes(f"P5\n{cols} {rows}\n255\n".encode("ascii") + gray.tobytes())
    return path


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(b"\n", 3)
    if parts[0] != b"P5":
        raise InvalidArgumentError("not a binary PGM file")
    cols, rows = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(rows, cols)


def read_config(path: str | Path) -> dict[str, str]:
    """
    Parse flat ``key = value`` lines.  Blank lines and ``#`` comments are
    ignored; keys may use ``-`` or ``_``.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgumentError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise InvalidArgumentError(f"{path}:{lineno}: empty key")
        out[key.replace("-", "_")] = value
    return out
