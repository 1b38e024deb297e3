"""Matrix CSV and tensor text formats.

Matrix CSV: no header, one row per line, comma-separated reals.

Tensor file: a header line ``n1 n2 n3`` followed by the entries of the mode-1
unfolding in row-major order (whitespace separated, one unfolding row per line
when written by :func:`write_tensor`).
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import DataError
from ..tensor import dematricize, matricize


def read_matrix_csv(path: str | Path) -> np.ndarray:
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rows.append([float(tok) for tok in line.split(",")])
                except ValueError:
                    raise DataError(f"{path}:{lineno}: non-numeric entry") from None
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise DataError(f"{path}: empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DataError(f"{path}: ragged rows")
    M = np.array(rows)
    if not np.all(np.isfinite(M)):
        raise DataError(f"{path}: non-finite entries")
    return M


def write_matrix_csv(M, path: str | Path) -> None:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        for row in M:
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def read_tensor(path: str | Path) -> np.ndarray:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    lines = text.splitlines()
    if not lines:
        raise DataError(f"{path}: empty tensor file")
    try:
        dims = tuple(int(t) for t in lines[0].split())
        values = np.array([float(t) for t in " ".join(lines[1:]).split()])
    except ValueError:
        raise DataError(f"{path}: malformed tensor file") from None
    if len(dims) != 3 or min(dims) < 1:
        raise DataError(f"{path}: header must be three positive integers")
    if values.size != dims[0] * dims[1] * dims[2]:
        raise DataError(f"{path}: expected {np.prod(dims)} entries, found {values.size}")
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: non-finite entries")
    return dematricize(values.reshape(dims[0], -1), 1, dims)


def write_tensor(X, path: str | Path) -> None:
    X = np.asarray(X, dtype=float)
    M = matricize(X, 1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(" ".join(str(d) for d in X.shape) + "\n")
        for row in M:
            fh.write(" ".join(f"{x:.17g}" for x in row) + "\n")
