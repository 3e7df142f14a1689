"""Sparse-recovery experiments: signal generation, LP decoders, trial sweeps.

All decoders solve linear programs of the shape

    min  (objective)   s.t.  ||b - A x||_1 <= eps,  ||x||_inf <= 1,  extras

with x split into nonnegative parts and the residual lifted through hinge
variables, so the whole pipeline runs on the package's own simplex.  The
l1 residual ball is used for every formulation (the noise models here are
encoded through their true l1 norm), keeping the decoder comparison
internally consistent.

Trials are seeded per (fraction index, trial index) through
``numpy.random.SeedSequence`` spawn keys, so a sweep is reproducible for a
fixed base seed no matter how the work is ordered.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .groups import GroupStructure, appendix_interval_groups, biadjacency, \
    refractoriness_matrix
from .intmat import IntMatrix
from .lp import LpProblem, LpStatus, solve_lp

DEFAULT_SEED = 12345


class RecoveryError(RuntimeError):
    """A decoder LP finished without an optimal solution."""

    def __init__(self, status):
        super().__init__(f"decoder LP status: {status}")
        self.status = status


@dataclass(frozen=True)
class RecoveryInstance:
    """One measurement setup: b = A x_true + w with an l1 fidelity radius."""

    x_true: np.ndarray
    a: np.ndarray
    w: np.ndarray
    b: np.ndarray
    epsilon: float

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def p(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True)
class NoiseSpec:
    """Measurement noise: 'sparse' (k Gaussian entries), 'dense', or 'none'.

    ``sigma`` is a variance by default (standard deviation sqrt(sigma));
    set ``sigma_is_variance=False`` to pass a standard deviation instead.
    """

    kind: str = "none"
    nonzeros: int = 0
    sigma: float = 0.0
    sigma_is_variance: bool = True

    def std(self) -> float:
        return math.sqrt(self.sigma) if self.sigma_is_variance else self.sigma


@dataclass(frozen=True)
class TrialRecord:
    solver: str
    n: int
    frac: float
    trial: int
    rel_err: float
    status: str
    ms: float


@dataclass(frozen=True)
class ExperimentConfig:
    """A trial sweep: which signal model, which decoders, which sizes."""

    kind: str                         # "dispersive" or "group-cover"
    p: int
    fractions: tuple[float, ...]
    trials: int
    base_seed: int
    noise: NoiseSpec
    solvers: tuple[str, ...]
    delta: int = 0                    # dispersive spacing
    amplitude: float = 1.0
    groups: GroupStructure | None = None
    cover_groups: int = 0             # G for slgl / signal generation
    per_group_nonzeros: int = 3
    sgl_alpha: float = 0.95

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("at least one trial required")
        if any(not 0 < f <= 1 for f in self.fractions):
            raise ValueError("measurement fractions must lie in (0, 1]")
        if self.kind not in ("dispersive", "group-cover"):
            raise ValueError(f"unknown experiment kind {self.kind!r}")


def dispersive_experiment_config(*, trials: int = 20, seed: int = DEFAULT_SEED,
                                 fractions: Sequence[float] = (0.15, 0.18, 0.25,
                                                               0.35, 0.5),
                                 p: int = 200, delta: int = 25) -> ExperimentConfig:
    """Spike-train recovery sweep: BP against DBP under sparse noise."""
    return ExperimentConfig(
        kind="dispersive", p=p, fractions=tuple(fractions), trials=trials,
        base_seed=seed, noise=NoiseSpec("sparse", nonzeros=15, sigma=0.01),
        solvers=("bp", "dbp"), delta=delta)


def group_cover_experiment_config(*, trials: int = 10, seed: int = DEFAULT_SEED,
                                  fractions: Sequence[float] = (0.25,),
                                  ) -> ExperimentConfig:
    """Interval-group recovery sweep: SLGL against SGL(inf) and BP."""
    return ExperimentConfig(
        kind="group-cover", p=200, fractions=tuple(fractions), trials=trials,
        base_seed=seed, noise=NoiseSpec("dense", sigma=0.01),
        solvers=("bp", "sgl-linf", "slgl"), groups=appendix_interval_groups(),
        cover_groups=5, per_group_nonzeros=3)


# ---------------------------------------------------------------------------
# signal and instance generation


def gen_spike_train(p: int, delta: int, amplitude: float = 1.0) -> np.ndarray:
    """Equal spikes at positions 1, 1+delta, 1+2*delta, ... (1-based).

    The spacing equals the refractory period exactly, so the signal always
    satisfies the sliding-window budget of ``refractoriness_matrix(p, delta)``.
    """
    if delta < 1:
        raise ValueError("spacing must be at least 1")
    if p < 1:
        raise ValueError("dimension must be positive")
    x = np.zeros(p)
    x[::delta] = amplitude
    return x


def gen_group_sparse_signal(g: GroupStructure, num_groups: int,
                            per_group: int, rng: np.random.Generator) -> np.ndarray:
    """Pick ``num_groups`` groups and ``per_group`` members in each; set ones.

    Picks are uniform without replacement; members chosen twice through
    overlapping groups merge, so the support size is at most
    num_groups * per_group.
    """
    if num_groups > g.num_groups:
        raise ValueError("cannot select more groups than exist")
    if any(per_group > len(grp) for grp in g.groups):
        raise ValueError("per-group nonzeros exceed the smallest group size")
    x = np.zeros(g.p)
    chosen = rng.choice(g.num_groups, size=num_groups, replace=False)
    for gi in chosen:
        members = np.asarray(g.groups[gi])
        picks = rng.choice(members, size=per_group, replace=False)
        x[picks - 1] = 1.0
    return x


def gen_instance(x_true: np.ndarray, n: int, noise: NoiseSpec,
                 rng: np.random.Generator) -> RecoveryInstance:
    """Column-normalized Gaussian measurements of x_true with the given noise."""
    if n < 1:
        raise ValueError("need at least one measurement")
    x_true = np.asarray(x_true, dtype=float)
    p = x_true.size
    a = rng.standard_normal((n, p))
    a /= np.linalg.norm(a, axis=0)
    if noise.kind == "none":
        w = np.zeros(n)
    elif noise.kind == "dense":
        w = noise.std() * rng.standard_normal(n)
    elif noise.kind == "sparse":
        w = np.zeros(n)
        k = min(noise.nonzeros, n)
        pos = rng.choice(n, size=k, replace=False)
        w[pos] = noise.std() * rng.standard_normal(k)
    else:
        raise ValueError(f"unknown noise kind {noise.kind!r}")
    b = a @ x_true + w
    return RecoveryInstance(x_true=x_true, a=a, w=w, b=b,
                            epsilon=float(np.abs(w).sum()))


def relative_error(x_true: np.ndarray, x_hat: np.ndarray) -> float:
    """||x_true - x_hat||_2 / ||x_true||_2."""
    x_true = np.asarray(x_true, dtype=float)
    denom = float(np.linalg.norm(x_true))
    if denom == 0.0:
        raise ZeroDivisionError("relative error undefined for a zero signal")
    return float(np.linalg.norm(x_true - np.asarray(x_hat, dtype=float)) / denom)


# ---------------------------------------------------------------------------
# decoders


def _fidelity_lp(inst: RecoveryInstance, extra_vars: int = 0):
    """Shared LP skeleton over variables [x+ (p), x- (p), t (n), extras].

    Rows: the two residual hinges, the total-residual budget, and the box
    x+_i + x-_i <= 1.  Returns (rows, rhs, lower, upper).
    """
    n, p = inst.n, inst.p
    total = 2 * p + n + extra_vars
    rows = np.zeros((2 * n + 1 + p, total))
    rhs = np.empty(2 * n + 1 + p)
    rows[:n, :p] = -inst.a
    rows[:n, p:2 * p] = inst.a
    rows[:n, 2 * p:2 * p + n] = -np.eye(n)
    rhs[:n] = -inst.b
    rows[n:2 * n, :p] = inst.a
    rows[n:2 * n, p:2 * p] = -inst.a
    rows[n:2 * n, 2 * p:2 * p + n] = -np.eye(n)
    rhs[n:2 * n] = inst.b
    rows[2 * n, 2 * p:2 * p + n] = 1.0
    rhs[2 * n] = inst.epsilon
    rows[2 * n + 1:, :p] = np.eye(p)
    rows[2 * n + 1:, p:2 * p] = np.eye(p)
    rhs[2 * n + 1:] = 1.0
    lower = np.zeros(total)
    upper = np.concatenate([np.ones(2 * p), np.full(n + extra_vars, np.inf)])
    return rows, rhs, lower, upper


def _solve_decoder(objective, rows, rhs, lower, upper, p: int) -> np.ndarray:
    sol = solve_lp(LpProblem(objective=objective, a=rows, b=rhs,
                             lower=lower, upper=upper))
    if not sol.optimal:
        raise RecoveryError(sol.status)
    return sol.x[:p] - sol.x[p:2 * p]


def solve_bp(inst: RecoveryInstance) -> np.ndarray:
    """Basis pursuit: min ||x||_1 on the fidelity ball and the unit box."""
    n, p = inst.n, inst.p
    rows, rhs, lower, upper = _fidelity_lp(inst)
    objective = np.concatenate([np.ones(2 * p), np.zeros(n)])
    return _solve_decoder(objective, rows, rhs, lower, upper, p)


def solve_dbp(inst: RecoveryInstance, budget: IntMatrix) -> np.ndarray:
    """Dispersive basis pursuit: BP plus the budget rows D (x+ + x-) <= 1."""
    n, p = inst.n, inst.p
    if budget.cols != p:
        raise ValueError(f"budget matrix has {budget.cols} columns, signal has {p}")
    rows, rhs, lower, upper = _fidelity_lp(inst)
    d = budget.to_numpy(float)
    extra = np.zeros((d.shape[0], rows.shape[1]))
    extra[:, :p] = d
    extra[:, p:2 * p] = d
    rows = np.vstack([rows, extra])
    rhs = np.concatenate([rhs, np.ones(d.shape[0])])
    objective = np.concatenate([np.ones(2 * p), np.zeros(n)])
    return _solve_decoder(objective, rows, rhs, lower, upper, p)


def solve_slgl(inst: RecoveryInstance, g: GroupStructure,
               num_cover_groups: int) -> np.ndarray:
    """Sparse latent group decoder: BP restricted to fractional G-coverable x."""
    n, p = inst.n, inst.p
    if g.p != p:
        raise ValueError("group structure does not match the signal length")
    m = g.num_groups
    rows, rhs, lower, upper = _fidelity_lp(inst, extra_vars=m)
    b_mat = biadjacency(g).to_numpy(float)
    cover = np.zeros((p + 1, rows.shape[1]))
    cover[:p, :p] = np.eye(p)
    cover[:p, p:2 * p] = np.eye(p)
    cover[:p, 2 * p + n:] = -b_mat
    cover[p, 2 * p + n:] = 1.0
    rows = np.vstack([rows, cover])
    rhs = np.concatenate([rhs, np.zeros(p), [float(num_cover_groups)]])
    upper[2 * p + n:] = 1.0
    objective = np.concatenate([np.ones(2 * p), np.zeros(n + m)])
    return _solve_decoder(objective, rows, rhs, lower, upper, p)


def solve_sgl_linf(inst: RecoveryInstance, g: GroupStructure,
                   alpha: float) -> np.ndarray:
    """Sparse group lasso with sup-norm group terms, as an LP.

    Minimizes (1-alpha) * sum_G sqrt(|G|) ||x_G||_inf + alpha * ||x||_1 on
    the fidelity ball and the unit box.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    n, p = inst.n, inst.p
    if g.p != p:
        raise ValueError("group structure does not match the signal length")
    m = g.num_groups
    rows, rhs, lower, upper = _fidelity_lp(inst, extra_vars=m)
    memberships = [(gi, j) for gi, grp in enumerate(g.groups) for j in grp]
    lift = np.zeros((len(memberships), rows.shape[1]))
    for r, (gi, j) in enumerate(memberships):
        lift[r, j - 1] = 1.0
        lift[r, p + j - 1] = 1.0
        lift[r, 2 * p + n + gi] = -1.0
    rows = np.vstack([rows, lift])
    rhs = np.concatenate([rhs, np.zeros(len(memberships))])
    upper[2 * p + n:] = 1.0
    group_w = (1.0 - alpha) * np.sqrt([len(grp) for grp in g.groups])
    objective = np.concatenate([np.full(2 * p, alpha), np.zeros(n), group_w])
    return _solve_decoder(objective, rows, rhs, lower, upper, p)


# ---------------------------------------------------------------------------
# trial sweeps


def _trial_rng(cfg: ExperimentConfig, frac_idx: int, trial: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=cfg.base_seed, spawn_key=(frac_idx, trial))
    return np.random.default_rng(seq)


def _make_signal(cfg: ExperimentConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.kind == "dispersive":
        return gen_spike_train(cfg.p, cfg.delta, cfg.amplitude)
    return gen_group_sparse_signal(cfg.groups, cfg.cover_groups,
                                   cfg.per_group_nonzeros, rng)


def _run_solver(name: str, cfg: ExperimentConfig, inst: RecoveryInstance,
                budget: IntMatrix | None) -> np.ndarray:
    if name == "bp":
        return solve_bp(inst)
    if name == "dbp":
        return solve_dbp(inst, budget)
    if name == "slgl":
        return solve_slgl(inst, cfg.groups, cfg.cover_groups)
    if name == "sgl-linf":
        return solve_sgl_linf(inst, cfg.groups, cfg.sgl_alpha)
    raise ValueError(f"unknown solver {name!r}")


def run_experiment(cfg: ExperimentConfig, *, progress=None) -> list[TrialRecord]:
    """Run every (fraction, trial, solver) cell and collect TrialRecords.

    Solver failures are recorded (status string, NaN error) without
    aborting the sweep.  Records come back in (fraction, trial, solver)
    order and are bitwise reproducible for a fixed base seed, wall time
    aside.
    """
    budget = refractoriness_matrix(cfg.p, cfg.delta) \
        if cfg.kind == "dispersive" else None
    records: list[TrialRecord] = []
    for fi, frac in enumerate(cfg.fractions):
        n = max(1, round(frac * cfg.p))
        for trial in range(cfg.trials):
            rng = _trial_rng(cfg, fi, trial)
            signal = _make_signal(cfg, rng)
            inst = gen_instance(signal, n, cfg.noise, rng)
            for solver in cfg.solvers:
                start = time.perf_counter()
                try:
                    x_hat = _run_solver(solver, cfg, inst, budget)
                    err = relative_error(signal, x_hat)
                    status = "optimal"
                except (RecoveryError, RuntimeError) as exc:
                    err = math.nan
                    status = getattr(exc, "status", None)
                    status = status.value if status is not None else "error"
                ms = 1000.0 * (time.perf_counter() - start)
                records.append(TrialRecord(solver, n, frac, trial, err,
                                           status, ms))
                if progress is not None:
                    progress(records[-1])
    return records


def mean_errors(records: Iterable[TrialRecord]) -> dict[tuple[str, float], float]:
    """Mean relative error keyed by (solver, fraction)."""
    sums: dict[tuple[str, float], list[float]] = {}
    for rec in records:
        sums.setdefault((rec.solver, rec.frac), []).append(rec.rel_err)
    return {key: float(np.mean(vals)) for key, vals in sums.items()}


CSV_HEADER = "solver,n,frac,trial,rel_err,status,ms"


def records_to_csv(records: Iterable[TrialRecord]) -> str:
    """Render TrialRecords in the stable CSV schema (6 significant digits)."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(f"{r.solver},{r.n},{r.frac:.6g},{r.trial},"
                     f"{r.rel_err:.6g},{r.status},{r.ms:.6g}")
    return "\n".join(lines) + "\n"


def write_records_csv(path, records: Iterable[TrialRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(records_to_csv(records))
