"""CSV output with ``#`` comment headers and 12-significant-digit values."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


def fmt(x: float) -> str:
    """Shortest round-trip text for ``x``, capped at 12 significant digits."""
    x = float(x)
    if x == 0:
        return "0"
    return "%.12g" % x


def provenance_lines(digest: str, seed: int, extra: dict | None = None) -> list[str]:
    lines = [f"config_digest={digest}", f"seed={seed}"]
    for k, v in (extra or {}).items():
        lines.append(f"{k}={v}")
    return lines


def write_csv(path, header: list[str], rows, comments: list[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")


def write_series(path, times, columns: dict[str, np.ndarray], comments: list[str] = ()) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(times, dtype=float)] + [np.asarray(columns[n], dtype=float) for n in names])
    write_csv(path, ["t"] + names, data, comments)


@dataclass
class CsvTable:
    comments: list[str]
    header: list[str]
    data: np.ndarray

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.header.index(name)]


def read_csv(path) -> CsvTable:
    """Parse a CSV written by :func:`write_csv`; raises :class:`ConfigError` if malformed."""
    comments, header, rows = [], None, []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        cells = [c.strip() for c in line.split(",")]
        if header is None:
            if any(not c for c in cells):
                raise ConfigError(f"{path}:{lineno}: empty column name")
            header = cells
            continue
        if len(cells) != len(header):
            raise ConfigError(f"{path}:{lineno}: expected {len(header)} values, got {len(cells)}")
        try:
            row = [float(c) for c in cells]
        except ValueError:
            raise ConfigError(f"{path}:{lineno}: empty or non-numeric value") from None
        if not all(math.isfinite(v) for v in row):
            raise ConfigError(f"{path}:{lineno}: non-finite value")
        rows.append(row)
    if header is None or not rows:
        raise ConfigError(f"{path}: no header or no data rows")
    if len(header) < 2:
        raise ConfigError(f"{path}: need a time column and at least one series")
    return CsvTable(comments, header, np.array(rows, dtype=float))
