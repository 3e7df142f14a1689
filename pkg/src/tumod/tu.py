"""Total unimodularity certification for small integer matrices.

A matrix is totally unimodular (TU) when every square submatrix has
determinant in {-1, 0, 1}.  At desk scale (min dimension <= 8) we decide
this exactly:

* the positive path certifies TU through the Ghouila-Houri signing
  criterion, evaluated exhaustively with integer arithmetic (an if-and-
  only-if characterization, so no violating minor exists when it holds);
* the negative path locates the lexicographically first violating minor
  by scanning submatrices in increasing order and recomputing each
  candidate determinant exactly with Bareiss elimination.

Two cheap sufficient conditions used by the constructions in this package
(two-nonzeros-per-row with zero row sums, and interval matrices) are also
provided; whenever one of them accepts a matrix the exhaustive check must
agree, which the test suite enforces.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .intmat import IntMatrix, bareiss_determinant, concat_rows, identity, int_matrix

EXHAUSTIVE_CAP = 8


@dataclass(frozen=True)
class TuVerdict:
    """Outcome of a TU check, with a violating minor on failure."""

    is_tu: bool
    witness_rows: tuple[int, ...] | None = None
    witness_cols: tuple[int, ...] | None = None
    witness_det: int | None = None

    @property
    def status(self) -> str:
        return "TU" if self.is_tu else "NotTU"

    def __str__(self) -> str:
        if self.is_tu:
            return "TU"
        return (f"NotTU rows={list(self.witness_rows)} "
                f"cols={list(self.witness_cols)} det={self.witness_det}")


def _first_bad_entry(m: IntMatrix):
    for i in range(m.rows):
        for j in range(m.cols):
            if m[i, j] not in (-1, 0, 1):
                return i, j
    return None


def _ghouila_houri_holds(a: np.ndarray) -> bool:
    """Exhaustive Ghouila-Houri check over subsets of the smaller dimension.

    Every subset of columns must admit a +/-1 signing whose signed column
    sum lies in {-1,0,1} for each row.  All arithmetic is int64 (sums are
    bounded by the subset size), so the verdict is exact.
    """
    if a.shape[1] > a.shape[0]:
        a = a.T
    rows, cols = a.shape
    if rows == 0 or cols == 0:
        return True
    signs = np.array(list(itertools.product((-1, 0, 1), repeat=cols)),
                     dtype=np.int64)
    sums = signs @ a.T.astype(np.int64)
    ok = (np.abs(sums) <= 1).all(axis=1)
    masks = ((signs != 0).astype(np.int64) << np.arange(cols, dtype=np.int64)).sum(axis=1)
    certified = np.zeros(1 << cols, dtype=bool)
    np.logical_or.at(certified, masks[ok], True)
    return bool(certified[1:].all())


def _first_violating_minor(m: IntMatrix):
    """Lexicographically first (k, rows, cols) square submatrix with |det| >= 2."""
    lim = min(m.rows, m.cols)
    for k in range(2, lim + 1):
        for rsel in itertools.combinations(range(m.rows), k):
            for csel in itertools.combinations(range(m.cols), k):
                det = bareiss_determinant(m.submatrix(rsel, csel))
                if det not in (-1, 0, 1):
                    return rsel, csel, det
    return None


def is_totally_unimodular(m: IntMatrix) -> TuVerdict:
    """Exact TU verdict with a deterministic witness minor on failure.

    Any entry outside {-1,0,1} yields an immediate 1x1 witness.  Otherwise
    requires ``min(rows, cols) <= 8``; larger matrices raise ValueError and
    callers should fall back to the sufficient conditions below or check
    column/row slices.
    """
    bad = _first_bad_entry(m)
    if bad is not None:
        i, j = bad
        return TuVerdict(False, (i,), (j,), m[i, j])
    if min(m.rows, m.cols) > EXHAUSTIVE_CAP:
        raise ValueError(
            f"exhaustive TU check capped at min dimension {EXHAUSTIVE_CAP}; "
            "use check_two_nonzero_row_condition / is_interval_matrix or "
            "verify slices")
    if m.rows == 0:
        return TuVerdict(True)
    if _ghouila_houri_holds(m.to_numpy()):
        return TuVerdict(True)
    witness = _first_violating_minor(m)
    if witness is None:  # pragma: no cover - the two criteria cannot disagree
        raise AssertionError("signing criterion and minor scan disagree")
    rsel, csel, det = witness
    return TuVerdict(False, rsel, csel, det)


def exhaustive_minor_verdict(m: IntMatrix) -> TuVerdict:
    """Reference TU check by scanning every square minor with Bareiss.

    Exponentially slower than :func:`is_totally_unimodular`; kept as the
    independent second route for cross-validation on small matrices.
    """
    bad = _first_bad_entry(m)
    if bad is not None:
        i, j = bad
        return TuVerdict(False, (i,), (j,), m[i, j])
    witness = _first_violating_minor(m)
    if witness is None:
        return TuVerdict(True)
    rsel, csel, det = witness
    return TuVerdict(False, rsel, csel, det)


def check_two_nonzero_row_condition(m: IntMatrix) -> bool:
    """Sufficient condition: <= 2 nonzeros per row, two-nonzero rows sum to 0.

    Entries must lie in {-1,0,1} (anything else fails).  When true, the
    all-in-one-class column partition certifies total unimodularity, so
    ``is_totally_unimodular`` must return TU.
    """
    for row in m.entries:
        nz = [v for v in row if v != 0]
        if any(v not in (-1, 1) for v in nz):
            return False
        if len(nz) > 2:
            return False
        if len(nz) == 2 and nz[0] + nz[1] != 0:
            return False
    return True


def is_interval_matrix(m: IntMatrix) -> bool:
    """True when entries are 0/1 and the ones in every row are consecutive."""
    for row in m.entries:
        if any(v not in (0, 1) for v in row):
            return False
        ones = [j for j, v in enumerate(row) if v == 1]
        if ones and ones[-1] - ones[0] + 1 != len(ones):
            return False
    return True


TU_PRESERVING_OPS = ("transpose", "append_identity", "append_unit_row",
                     "duplicate_row")


def tu_preserving(m: IntMatrix, op: str) -> IntMatrix:
    """Apply a matrix transformation used in the TU constructions.

    transpose, append_identity (stack an identity block below) and
    duplicate_row (repeat the last row) preserve TU status.
    append_unit_row stacks a row of all ones -- this builds the augmented
    cover matrix and does NOT preserve TU in general, so callers must
    re-verify the result.
    """
    if op == "transpose":
        return m.transpose()
    if op == "append_identity":
        return concat_rows(m, identity(m.cols))
    if op == "append_unit_row":
        return concat_rows(m, int_matrix([[1] * m.cols], cols=m.cols))
    if op == "duplicate_row":
        if m.rows == 0:
            raise ValueError("cannot duplicate a row of an empty matrix")
        return concat_rows(m, int_matrix([m.row(m.rows - 1)], cols=m.cols))
    raise ValueError(f"unknown op {op!r}; expected one of {TU_PRESERVING_OPS}")
