"""Brute-force conjugation oracle for arbitrary support penalties.

For a set function F tabulated on all 2^p supports, the conjugate of
g(x) = F(supp(x)) over the unit sup-norm ball reduces to a finite maximum,
and the biconjugate (the convex envelope over the ball) to a small LP.
This module computes both exactly and serves as the ground truth that the
closed-form envelopes are checked against: for a totally unimodular model
the envelope and the biconjugate must coincide.

Two independent LP routes are implemented for the biconjugate -- the
support-price form and the convex-combination form.  They are LP duals of
one another, and their agreement is asserted in the tests as a built-in
cross-check of the whole derivation chain.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

from .lp import LpProblem, LpStatus, solve_lp

TABULATE_CAP = 14
BOX_TOL = 1e-9


@dataclass(frozen=True)
class SupportFunctionTable:
    """Values F(s) for every support s of {1..p}, indexed by bitmask.

    Bit i of the mask corresponds to coordinate i (0-based); entry 0 is the
    empty support.  Infinite entries mark forbidden supports.
    """

    p: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.size != 1 << self.p:
            raise ValueError(f"need {1 << self.p} entries for p={self.p}")
        if not math.isfinite(vals[0]):
            raise ValueError("the empty support must have a finite value")
        object.__setattr__(self, "values", vals)
        if abs(vals[0]) > 1e-12:
            warnings.warn(f"support table is not normalized: F(empty)={vals[0]}",
                          stacklevel=3)

    @cached_property
    def indicators(self) -> np.ndarray:
        """(2^p, p) matrix whose rows are the support indicator vectors."""
        masks = np.arange(1 << self.p, dtype=np.uint32)
        return ((masks[:, None] >> np.arange(self.p)) & 1).astype(float)

    @cached_property
    def finite_mask(self) -> np.ndarray:
        return np.isfinite(self.values)

    def value_of(self, support) -> float:
        mask = 0
        for i in support:
            mask |= 1 << (int(i) - 1)
        return float(self.values[mask])


def tabulate(penalty: Callable[[np.ndarray], float], p: int) -> SupportFunctionTable:
    """Evaluate a penalty on every indicator vector of {1..p}."""
    if p > TABULATE_CAP:
        raise ValueError(f"tabulation capped at p={TABULATE_CAP}")
    vals = np.empty(1 << p)
    for mask in range(1 << p):
        ind = np.array([(mask >> i) & 1 for i in range(p)], dtype=float)
        vals[mask] = penalty(ind)
    if not np.isfinite(vals).any():
        raise ValueError("penalty is infinite on every support")
    return SupportFunctionTable(p, vals)


def conjugate(table: SupportFunctionTable, y) -> float:
    """g*(y) = max over finite supports of |y|'s - F(s); exact."""
    ay = np.abs(np.asarray(y, dtype=float).ravel())
    if ay.size != table.p:
        raise ValueError(f"expected length {table.p}, got {ay.size}")
    gains = table.indicators[table.finite_mask] @ ay \
        - table.values[table.finite_mask]
    return float(gains.max())


def biconjugate(table: SupportFunctionTable, x) -> float:
    """Envelope value g**(x) over the unit box via the support-price LP.

    Maximizes |x|'z - t subject to z's - t <= F(s) for every finite-F
    support, z >= 0.  Unboundedness means |x| is not dominated by any
    convex combination of allowed supports, hence the value is inf; points
    outside the unit box are inf by definition.
    """
    ax = np.abs(np.asarray(x, dtype=float).ravel())
    if ax.size != table.p:
        raise ValueError(f"expected length {table.p}, got {ax.size}")
    if ax.size and ax.max() > 1.0 + BOX_TOL:
        return math.inf
    s_mat = table.indicators[table.finite_mask]
    f_vals = table.values[table.finite_mask]
    n_s = s_mat.shape[0]
    # variables [z (p); t]; rows z's - t <= F(s)
    a = np.hstack([s_mat, -np.ones((n_s, 1))])
    objective = np.concatenate([ax, [-1.0]])
    lower = np.concatenate([np.zeros(table.p), [-np.inf]])
    upper = np.full(table.p + 1, np.inf)
    sol = solve_lp(LpProblem(objective=objective, a=a, b=f_vals,
                             lower=lower, upper=upper, maximize=True))
    if sol.status is LpStatus.UNBOUNDED:
        return math.inf
    if not sol.optimal:
        raise RuntimeError(f"conjugation LP ended with status {sol.status}")
    return sol.value


def biconjugate_dominated(table: SupportFunctionTable, x) -> float:
    """Second oracle: cheapest convex combination of supports dominating |x|.

    Minimizes sum lambda_s F(s) over lambda in the simplex with
    sum lambda_s s >= |x|.  This is the LP dual of :func:`biconjugate`;
    the two must agree wherever both are finite.
    """
    ax = np.abs(np.asarray(x, dtype=float).ravel())
    if ax.size != table.p:
        raise ValueError(f"expected length {table.p}, got {ax.size}")
    if ax.size and ax.max() > 1.0 + BOX_TOL:
        return math.inf
    s_mat = table.indicators[table.finite_mask]
    f_vals = table.values[table.finite_mask]
    n_s = s_mat.shape[0]
    # rows: -S'lambda <= -|x|;  1'lambda <= 1;  -1'lambda <= -1
    a = np.vstack([-s_mat.T, np.ones((1, n_s)), -np.ones((1, n_s))])
    b = np.concatenate([-ax, [1.0, -1.0]])
    sol = solve_lp(LpProblem(objective=f_vals, a=a, b=b,
                             lower=np.zeros(n_s), upper=np.ones(n_s)))
    if sol.status is LpStatus.INFEASIBLE:
        return math.inf
    if not sol.optimal:
        raise RuntimeError(f"domination LP ended with status {sol.status}")
    return sol.value
