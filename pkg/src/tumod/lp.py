"""Dense linear programming in inequality form.

Problems are ``min/max c'v  s.t.  A v <= b,  lower <= v <= upper`` with
possibly infinite bounds.  Two solution paths are provided:

* :func:`solve_lp` -- a self-contained bounded-variable primal simplex
  (two phases, explicit basis inverse, deterministic pivoting).  Simplex is
  used deliberately: it returns vertex solutions, which makes integrality
  of optima over unimodular systems directly observable.
* :func:`enumerate_vertices_optimum` -- a brute-force oracle that enumerates
  every basic point of small problems; used to cross-check the simplex.

Both report status Optimal / Infeasible / Unbounded and agree on small
random instances to 1e-8 (see the test suite).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

FEAS_TOL = 1e-8          # constraint satisfaction on reported solutions
REDCOST_TOL = 1e-9       # reduced-cost threshold for entering candidates
PIVOT_TOL = 1e-10        # smallest usable pivot magnitude
REFACTOR_EVERY = 128     # basis-inverse rebuild cadence


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class LpSolverError(RuntimeError):
    """Numerical failure: pivoting stalled or the basis became singular."""


@dataclass(frozen=True)
class LpProblem:
    """min (or max) objective'v  subject to  A v <= b  and  lower <= v <= upper."""

    objective: np.ndarray
    a: np.ndarray
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    maximize: bool = False

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=float).ravel()
        a = np.asarray(self.a, dtype=float).reshape(-1, c.size) if np.size(self.a) \
            else np.zeros((0, c.size))
        b = np.asarray(self.b, dtype=float).ravel()
        lo = np.asarray(self.lower, dtype=float).ravel()
        hi = np.asarray(self.upper, dtype=float).ravel()
        if a.shape[0] != b.size:
            raise ValueError("A and b row counts differ")
        if lo.size != c.size or hi.size != c.size:
            raise ValueError("bound vectors must match the variable count")
        if np.any(lo > hi):
            raise ValueError("lower bound exceeds upper bound")
        if not (np.all(np.isfinite(b)) and np.all(np.isfinite(a))
                and np.all(np.isfinite(c))):
            raise ValueError("A, b and the objective must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_constraints(self) -> int:
        return self.b.size


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    value: float = np.nan
    x: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


# nonbasic variable states
_AT_LOWER, _AT_UPPER, _FREE = 0, 1, 2


class _Simplex:
    """Bounded-variable primal simplex over A_ext v = b with per-column bounds."""

    def __init__(self, a_ext: np.ndarray, b: np.ndarray,
                 lo: np.ndarray, hi: np.ndarray,
                 basis: np.ndarray, nb_state: np.ndarray,
                 pivot_rule: str, max_iter: int):
        self.a = a_ext
        self.b = b
        self.lo = lo
        self.hi = hi
        self.m, self.total = a_ext.shape
        self.basis = basis
        self.in_basis = np.zeros(self.total, dtype=bool)
        self.in_basis[basis] = True
        self.nb_state = nb_state
        self.fixed = (hi - lo) <= 0.0
        self.pivot_rule = pivot_rule
        self.max_iter = max_iter
        self.iterations = 0
        self.degenerate_run = 0
        self.use_bland = pivot_rule == "bland"
        self.binv = self._invert_basis()
        self.xb = None
        self._refresh_basic_values()

    # -- basis maintenance ------------------------------------------------

    def _invert_basis(self) -> np.ndarray:
        try:
            return np.linalg.inv(self.a[:, self.basis])
        except np.linalg.LinAlgError as exc:
            raise LpSolverError("singular basis matrix") from exc

    def _nonbasic_values(self) -> np.ndarray:
        vals = np.where(self.nb_state == _AT_UPPER, self.hi, self.lo)
        vals[self.nb_state == _FREE] = 0.0
        vals[self.in_basis] = 0.0
        return vals

    def _refresh_basic_values(self) -> None:
        vn = self._nonbasic_values()
        self.xb = self.binv @ (self.b - self.a @ vn)

    def _refactor(self) -> None:
        self.binv = self._invert_basis()
        self._refresh_basic_values()

    # -- pivoting ---------------------------------------------------------

    def _choose_entering(self, d: np.ndarray):
        can_inc = (~self.in_basis) & (~self.fixed) & (d < -REDCOST_TOL) \
            & ((self.nb_state == _AT_LOWER) | (self.nb_state == _FREE))
        can_dec = (~self.in_basis) & (~self.fixed) & (d > REDCOST_TOL) \
            & ((self.nb_state == _AT_UPPER) | (self.nb_state == _FREE))
        eligible = can_inc | can_dec
        if not eligible.any():
            return None, 0
        idx = np.nonzero(eligible)[0]
        if self.use_bland:
            j = int(idx[0])
        else:
            j = int(idx[np.argmax(np.abs(d[idx]))])
        return j, (1 if can_inc[j] else -1)

    def run(self, cost: np.ndarray) -> None:
        """Pivot until optimal for ``cost``; raises on unboundedness via flag."""
        self.unbounded = False
        since_refactor = 0
        while True:
            y = cost[self.basis] @ self.binv
            d = cost - y @ self.a
            j, sigma = self._choose_entering(d)
            if j is None:
                return
            self.iterations += 1
            if self.iterations > self.max_iter:
                raise LpSolverError(
                    f"simplex stalled: exceeded {self.max_iter} pivots")
            w = self.binv @ self.a[:, j]

            # ratio test: basic values move by -sigma*t*w for step t >= 0
            coef = sigma * w
            t_block = np.full(self.m, np.inf)
            dec = coef > PIVOT_TOL
            if dec.any():
                lob = self.lo[self.basis[dec]]
                t_block[dec] = np.where(np.isfinite(lob),
                                        (self.xb[dec] - lob) / coef[dec], np.inf)
            inc = coef < -PIVOT_TOL
            if inc.any():
                hib = self.hi[self.basis[inc]]
                t_block[inc] = np.where(np.isfinite(hib),
                                        (hib - self.xb[inc]) / (-coef[inc]), np.inf)
            t_block = np.maximum(t_block, 0.0)
            span = self.hi[j] - self.lo[j]       # inf unless both bounds finite
            t_min = t_block.min() if self.m else np.inf
            step = min(span, t_min)
            if not np.isfinite(step):
                self.unbounded = True
                return
            self.degenerate_run = self.degenerate_run + 1 if step <= 1e-12 else 0
            if not self.use_bland and self.degenerate_run > 2 * (self.m + 8):
                self.use_bland = True        # anti-cycling fallback

            if span <= t_min:
                # bound flip: j stays nonbasic, jumps to its other bound
                self.xb -= step * coef
                self.nb_state[j] = _AT_UPPER if sigma > 0 else _AT_LOWER
                continue

            blockers = np.nonzero(t_block <= t_min)[0]
            r = int(blockers[np.argmin(self.basis[blockers])])
            leaving = self.basis[r]
            if self.nb_state[j] == _FREE:
                enter_val = 0.0
            else:
                enter_val = self.lo[j] if self.nb_state[j] == _AT_LOWER else self.hi[j]
            enter_val += sigma * step

            self.xb -= step * coef
            self.nb_state[leaving] = _AT_LOWER if coef[r] > 0 else _AT_UPPER
            if not np.isfinite(self.lo[leaving]) and not np.isfinite(self.hi[leaving]):
                self.nb_state[leaving] = _FREE   # cannot happen via ratio test
            self.in_basis[leaving] = False
            self.in_basis[j] = True
            self.basis[r] = j
            self.xb[r] = enter_val

            piv = w[r]
            if abs(piv) < PIVOT_TOL:
                raise LpSolverError("pivot element vanished")
            self.binv[r] /= piv
            others = np.arange(self.m) != r
            self.binv[others] -= np.outer(w[others], self.binv[r])

            since_refactor += 1
            if since_refactor >= REFACTOR_EVERY:
                self._refactor()
                since_refactor = 0

    def values(self) -> np.ndarray:
        v = self._nonbasic_values()
        v[self.basis] = self.xb
        return v


def solve_lp(problem: LpProblem, *, pivot_rule: str = "dantzig",
             max_iter: int | None = None) -> LpSolution:
    """Solve an LpProblem with the bounded-variable primal simplex.

    ``pivot_rule`` is "dantzig" (most-negative reduced cost, lowest index on
    ties, with an automatic switch to Bland's rule after a long degenerate
    run) or "bland" (lowest eligible index throughout).  Both are
    deterministic; results agree to solver tolerance.

    Raises LpSolverError if pivoting exceeds the iteration cap
    (default ``50 * (num_vars + num_constraints)``).
    """
    if pivot_rule not in ("dantzig", "bland"):
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    n, m = problem.num_vars, problem.num_constraints
    if max_iter is None:
        max_iter = 50 * (n + m)
    cost = -problem.objective if problem.maximize else problem.objective

    # standard form: [A | I] (v, s) = b with slacks s in [0, inf)
    a_ext = np.hstack([problem.a, np.eye(m)]) if m else np.zeros((0, n))
    lo = np.concatenate([problem.lower, np.zeros(m)])
    hi = np.concatenate([problem.upper, np.full(m, np.inf)])

    nb_state = np.full(n + m, _AT_LOWER, dtype=np.int8)
    start = np.where(np.isfinite(problem.lower), problem.lower,
                     np.where(np.isfinite(problem.upper), problem.upper, 0.0))
    nb_state[:n][~np.isfinite(problem.lower) & np.isfinite(problem.upper)] = _AT_UPPER
    nb_state[:n][~np.isfinite(problem.lower) & ~np.isfinite(problem.upper)] = _FREE

    resid = problem.b - problem.a @ start if m else np.zeros(0)
    bad = resid < 0
    n_art = int(bad.sum())
    if n_art:
        art_cols = np.zeros((m, n_art))
        art_cols[np.nonzero(bad)[0], np.arange(n_art)] = -1.0
        a_ext = np.hstack([a_ext, art_cols])
        lo = np.concatenate([lo, np.zeros(n_art)])
        hi = np.concatenate([hi, np.full(n_art, np.inf)])
        nb_state = np.concatenate([nb_state, np.full(n_art, _AT_LOWER, np.int8)])

    basis = np.arange(n, n + m)
    art_of_row = np.nonzero(bad)[0]
    basis[art_of_row] = n + m + np.arange(n_art)

    sx = _Simplex(a_ext, problem.b, lo, hi, basis, nb_state, pivot_rule, max_iter)

    if n_art:
        phase1 = np.zeros(a_ext.shape[1])
        phase1[n + m:] = 1.0
        sx.run(phase1)
        if sx.unbounded:
            raise LpSolverError("phase-1 objective reported unbounded")
        art_vals = sx.values()[n + m:]
        if art_vals.sum() > 1e-7:
            return LpSolution(LpStatus.INFEASIBLE)
        sx.hi[n + m:] = 0.0                    # pin artificials at zero
        sx.fixed[n + m:] = True
        sx._refresh_basic_values()

    full_cost = np.concatenate([cost, np.zeros(a_ext.shape[1] - n)])
    sx.run(full_cost)
    if sx.unbounded:
        return LpSolution(LpStatus.UNBOUNDED)

    x = sx.values()[:n]
    value = float(problem.objective @ x)
    return LpSolution(LpStatus.OPTIMAL, value, x)


def _stacked_constraints(problem: LpProblem):
    """All constraints as G v <= h: A rows, then finite lower, then finite upper."""
    n = problem.num_vars
    blocks_g, blocks_h = [problem.a], [problem.b]
    fin_lo = np.nonzero(np.isfinite(problem.lower))[0]
    if fin_lo.size:
        g = np.zeros((fin_lo.size, n))
        g[np.arange(fin_lo.size), fin_lo] = -1.0
        blocks_g.append(g)
        blocks_h.append(-problem.lower[fin_lo])
    fin_hi = np.nonzero(np.isfinite(problem.upper))[0]
    if fin_hi.size:
        g = np.zeros((fin_hi.size, n))
        g[np.arange(fin_hi.size), fin_hi] = 1.0
        blocks_g.append(g)
        blocks_h.append(problem.upper[fin_hi])
    return np.vstack(blocks_g), np.concatenate(blocks_h)


def _best_vertex(g: np.ndarray, h: np.ndarray, objective: np.ndarray, minimize: bool):
    """Enumerate all nondegenerate active sets of G v <= h; return the best vertex."""
    n = objective.size
    rows = g.shape[0]
    if rows < n:
        return None, np.nan
    combos = np.array(list(itertools.combinations(range(rows), n)), dtype=int)
    mats = g[combos]                                     # (K, n, n)
    dets = np.abs(np.linalg.det(mats))
    scale = np.maximum(np.abs(mats).sum(axis=(1, 2)), 1.0)
    keep = dets > 1e-10 * scale
    if not keep.any():
        return None, np.nan
    mats = mats[keep]
    rhs = h[combos[keep]]
    pts = np.linalg.solve(mats, rhs[..., None])[..., 0]  # (K', n)
    slack = h[None, :] - pts @ g.T
    feas = (slack >= -FEAS_TOL).all(axis=1)
    if not feas.any():
        return None, np.nan
    pts = pts[feas]
    vals = pts @ objective
    best = int(np.argmin(vals)) if minimize else int(np.argmax(vals))
    return pts[best], float(vals[best])


def enumerate_vertices_optimum(problem: LpProblem, *, max_vars: int = 10) -> LpSolution:
    """Exact brute-force LP oracle: enumerate every vertex of the feasible set.

    Works by trying all choices of ``num_vars`` active constraints among the
    inequality rows and finite bounds.  Unboundedness is decided by a second
    vertex enumeration over the recession directions intersected with the
    unit box.  Intended for cross-checking solve_lp on small instances; the
    feasible set must be pointed (every variable should carry at least one
    finite bound unless the rows pin it down).
    """
    n = problem.num_vars
    if n > max_vars:
        raise ValueError(f"vertex enumeration capped at {max_vars} variables")
    g, h = _stacked_constraints(problem)
    point, value = _best_vertex(g, h, problem.objective, minimize=not problem.maximize)
    if point is None:
        return LpSolution(LpStatus.INFEASIBLE)

    # recession polytope: A d <= 0, bound-compatible directions, |d_i| <= 1
    m = problem.num_constraints
    blocks_g = [problem.a] if m else []
    blocks_h = [np.zeros(m)] if m else []
    for i in range(n):
        if np.isfinite(problem.lower[i]):
            row = np.zeros(n)
            row[i] = -1.0
            blocks_g.append(row[None, :])
            blocks_h.append(np.zeros(1))
        if np.isfinite(problem.upper[i]):
            row = np.zeros(n)
            row[i] = 1.0
            blocks_g.append(row[None, :])
            blocks_h.append(np.zeros(1))
    blocks_g.append(np.eye(n))
    blocks_h.append(np.ones(n))
    blocks_g.append(-np.eye(n))
    blocks_h.append(np.ones(n))
    g_rec = np.vstack(blocks_g)
    h_rec = np.concatenate(blocks_h)
    _, ray_val = _best_vertex(g_rec, h_rec, problem.objective,
                              minimize=not problem.maximize)
    improving = ray_val < -FEAS_TOL if not problem.maximize else ray_val > FEAS_TOL
    if np.isfinite(ray_val) and improving:
        return LpSolution(LpStatus.UNBOUNDED)
    return LpSolution(LpStatus.OPTIMAL, value, point)


def feasibility_violation(problem: LpProblem, x: np.ndarray) -> float:
    """Largest constraint/bound violation of x (0 when feasible)."""
    x = np.asarray(x, dtype=float)
    worst = 0.0
    if problem.num_constraints:
        worst = float(np.max(problem.a @ x - problem.b, initial=0.0))
    lo_viol = np.where(np.isfinite(problem.lower), problem.lower - x, -np.inf)
    hi_viol = np.where(np.isfinite(problem.upper), x - problem.upper, -np.inf)
    return max(worst, float(lo_viol.max(initial=0.0)), float(hi_viol.max(initial=0.0)))
