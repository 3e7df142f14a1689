"""Exact integer matrices and fraction-free determinants.

All structure matrices in this package (group incidence, interval windows,
tree incidence, concatenations of these) are stored as ``IntMatrix`` values:
dense, immutable, with Python-int entries so that determinant computations
are exact.  Unimodularity verdicts must never depend on floating-point
rounding, which rules out ``numpy.linalg.det`` for anything load-bearing.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class IntMatrix:
    """Dense integer matrix with entrywise equality.

    ``entries`` is a tuple of row tuples.  Zero-row matrices are allowed
    (the edge-node incidence of a single-node tree is 0 x 1) but every row
    must have at least one column.
    """

    entries: tuple[tuple[int, ...], ...]
    cols: int

    def __post_init__(self):
        if self.cols < 1:
            raise ValueError("IntMatrix needs at least one column")
        for row in self.entries:
            if len(row) != self.cols:
                raise ValueError("ragged rows in IntMatrix")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def to_numpy(self, dtype=np.int64) -> np.ndarray:
        return np.array(self.entries, dtype=dtype).reshape(self.rows, self.cols)

    def transpose(self) -> "IntMatrix":
        if self.rows == 0:
            raise ValueError("cannot transpose a zero-row matrix")
        return int_matrix([[self.entries[i][j] for i in range(self.rows)]
                           for j in range(self.cols)], cols=self.rows)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "IntMatrix":
        return int_matrix([[self.entries[i][j] for j in col_idx] for i in row_idx],
                          cols=len(col_idx))

    def __str__(self) -> str:
        return format_int_matrix(self)


def int_matrix(rows: Iterable[Iterable[int]], cols: int | None = None) -> IntMatrix:
    """Build an IntMatrix from nested iterables of integers."""
    data = tuple(tuple(int(v) for v in row) for row in rows)
    if cols is None:
        if not data:
            raise ValueError("cannot infer column count of an empty matrix")
        cols = len(data[0])
    return IntMatrix(data, cols)


def identity(n: int) -> IntMatrix:
    return int_matrix([[1 if i == j else 0 for j in range(n)] for i in range(n)],
                      cols=n)


def concat_rows(*mats: IntMatrix) -> IntMatrix:
    """Stack matrices vertically; all must share the column count."""
    cols = mats[0].cols
    for m in mats:
        if m.cols != cols:
            raise ValueError("column mismatch in concat_rows")
    return IntMatrix(tuple(r for m in mats for r in m.entries), cols)


def concat_cols(*mats: IntMatrix) -> IntMatrix:
    """Stack matrices horizontally; all must share the row count."""
    rows = mats[0].rows
    for m in mats:
        if m.rows != rows:
            raise ValueError("row mismatch in concat_cols")
    return int_matrix([sum((m.entries[i] for m in mats), ()) for i in range(rows)],
                      cols=sum(m.cols for m in mats))


def bareiss_determinant(m: IntMatrix) -> int:
    """Exact determinant of a square IntMatrix via fraction-free elimination.

    The Bareiss scheme keeps every intermediate value an integer (each is
    itself a minor of the input), so with Python ints the result is exact
    for any size.  Raises ValueError on non-square input.
    """
    if m.rows != m.cols:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [list(row) for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * pivot - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = pivot
    return sign * a[n - 1][n - 1]


def parse_int_matrix(text: str) -> IntMatrix:
    """Parse the matrix text format: first line "rows cols", then one row per line."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError("matrix header must be 'rows cols'")
    r, c = int(header[0]), int(header[1])
    if len(lines) - 1 != r:
        raise ValueError(f"expected {r} rows, found {len(lines) - 1}")
    rows = []
    for ln in lines[1:]:
        vals = [int(tok) for tok in ln.split()]
        if len(vals) != c:
            raise ValueError(f"expected {c} entries per row, got {len(vals)}")
        rows.append(vals)
    return int_matrix(rows, cols=c)


def format_int_matrix(m: IntMatrix) -> str:
    lines = [f"{m.rows} {m.cols}"]
    lines.extend(" ".join(str(v) for v in row) for row in m.entries)
    return "\n".join(lines) + "\n"


def read_int_matrix(path) -> IntMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_int_matrix(fh.read())


def write_int_matrix(path, m: IntMatrix) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_int_matrix(m))


def parse_float_matrix(text: str) -> np.ndarray:
    """Parse the same text format with decimal entries (LP data)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty matrix text")
    r, c = (int(tok) for tok in lines[0].split())
    if len(lines) - 1 != r:
        raise ValueError(f"expected {r} rows, found {len(lines) - 1}")
    out = np.empty((r, c), dtype=float)
    for i, ln in enumerate(lines[1:]):
        vals = [float(tok) for tok in ln.split()]
        if len(vals) != c:
            raise ValueError(f"expected {c} entries per row, got {len(vals)}")
        out[i] = vals
    return out


def format_float_matrix(a: np.ndarray) -> str:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    lines = [f"{a.shape[0]} {a.shape[1]}"]
    lines.extend(" ".join(repr(float(v)) for v in row) for row in a)
    return "\n".join(lines) + "\n"
