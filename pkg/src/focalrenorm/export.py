"""CSV and plain-PGM writers.  Output is deterministic: fixed 17-digit floats, no timestamps."""

from __future__ import annotations

import io
import sys
from pathlib import Path

import numpy as np

from .focal import SIGMA_INF, FocalGrid


def fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    """Write to ``path``; ``"-"`` means standard output."""
    text = csv_text(header, rows)
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def grid_rows(grid: FocalGrid):
    for i, t in enumerate(grid.t_axis):
        for j, x in enumerate(grid.x_axis):
            idx = grid.index[i, j]
            yield (t, x, "inf" if idx == SIGMA_INF else int(idx),
                   "near-boundary" if grid.near_boundary[i, j] else "certain")


def write_grid_csv(path, grid: FocalGrid) -> None:
    write_csv(path, ("t", "x", "index", "flag"), grid_rows(grid))


def pgm_text(grid: FocalGrid) -> str:
    """Plain P2 image: ``t`` runs left to right, ``x`` bottom to top; grey level = index, 255 = inf."""
    levels = np.where(grid.index == SIGMA_INF, 255, np.minimum(grid.index, 254)).astype(int)
    img = levels.T[::-1]  # rows = x descending
    height, width = img.shape
    lines = ["P2", f"{width} {height}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in img)
    return "\n".join(lines) + "\n"


def write_pgm(path, grid: FocalGrid) -> None:
    Path(path).write_text(pgm_text(grid))


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text().split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    width, height = int(tokens[1]), int(tokens[2])
    data = np.array([int(v) for v in tokens[4:]], dtype=int)
    return data.reshape(height, width)
