"""Command-line front end.

Subcommands: check-tu, penalty, envelope, normball, oracle-check,
experiment.  Exit codes: 0 success, 1 domain error (an infeasible value,
a failed oracle comparison, or NotTU under --expect-tu), 2 usage error.
The TUMOD_SEED environment variable overrides the experiment base seed.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import envelopes, oracle, penalties, recovery
from .groups import (GroupStructure, TreeStructure, appendix_interval_groups,
                     biadjacency, read_group_file, refractoriness_matrix,
                     tree_structure)
from .intmat import IntMatrix, read_int_matrix
from .tu import is_totally_unimodular

MODELS = ("group-intersection", "group-cover", "within-group-sparsity",
          "sparse-g-cover", "tree-l0", "knapsack", "dispersive-l0",
          "pairwise-dispersive")
ALIASES = {"latent-group": "group-cover", "tree": "tree-l0"}


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok != ""])
    except ValueError as exc:
        raise SystemExit(f"error: bad vector {text!r}: {exc}")


def _parse_edges(text: str) -> list[tuple[int, int]]:
    edges = []
    for part in text.split(","):
        if not part:
            continue
        try:
            i, j = part.split("-")
            edges.append((int(i), int(j)))
        except ValueError:
            raise SystemExit(f"error: bad edge {part!r}; expected like 1-2")
    return edges


@dataclass
class Model:
    """A resolved model: dimension plus penalty and envelope evaluators."""

    name: str
    p: int
    penalty: Callable[[np.ndarray], float]
    envelope: Callable[[np.ndarray], float]


def _load_groups(args) -> GroupStructure:
    if args.groups is None:
        raise SystemExit(f"error: model {args.model!r} requires --groups")
    if args.groups == "appendix":
        return appendix_interval_groups()
    return read_group_file(args.groups)


def _envelope_float(value) -> float:
    return float(value.value if isinstance(value, envelopes.EnvelopeValue) else value)


def _build_model(args, p_hint: int | None) -> Model:
    name = ALIASES.get(args.model, args.model)
    if name == "group-intersection":
        g = _load_groups(args)
        return Model(name, g.p,
                     lambda x: penalties.group_intersection_penalty(x, g),
                     lambda x: envelopes.group_intersection_envelope(x, g))
    if name == "group-cover":
        g = _load_groups(args)
        return Model(name, g.p,
                     lambda x: penalties.group_cover_penalty(x, g),
                     lambda x: _envelope_float(envelopes.latent_group_envelope(x, g)))
    if name == "within-group-sparsity":
        g = _load_groups(args)
        variant = args.variant
        return Model(name, g.p,
                     lambda x: penalties.within_group_sparsity_penalty(x, g, variant),
                     lambda x: envelopes.sparse_group_surrogate(x, g, variant))
    if name == "sparse-g-cover":
        g = _load_groups(args)
        if args.cover_groups is None:
            raise SystemExit("error: sparse-g-cover requires --G")
        budget = args.cover_groups
        return Model(name, g.p,
                     lambda x: penalties.sparse_g_cover_penalty(x, g, budget),
                     lambda x: _envelope_float(
                         envelopes.sparse_g_cover_envelope(x, g, budget)))
    if name == "tree-l0":
        if args.parents is None:
            raise SystemExit("error: tree-l0 requires --parents (e.g. 0,1,1)")
        t = tree_structure([int(v) for v in args.parents.split(",")])
        return Model(name, t.p,
                     lambda x: penalties.tree_l0_penalty(x, t),
                     lambda x: envelopes.tree_envelope(x, t))
    if name == "knapsack":
        g = _load_groups(args)
        bt = biadjacency(g).transpose()
        return Model(name, g.p,
                     lambda x: penalties.knapsack_penalty(x, g),
                     lambda x: envelopes.knapsack_envelope(x, bt))
    if name == "dispersive-l0":
        if args.delta is not None:
            p = p_hint
            if p is None:
                raise SystemExit("error: dispersive-l0 with --delta needs --p "
                                 "or an --x vector")
            bt = refractoriness_matrix(p, args.delta)
        else:
            g = _load_groups(args)
            bt = biadjacency(g).transpose()
            p = g.p
        return Model(name, p,
                     lambda x: penalties.dispersive_l0_penalty(x, bt),
                     lambda x: envelopes.dispersive_l0_envelope(x, bt))
    if name == "pairwise-dispersive":
        if args.edges is None:
            raise SystemExit("error: pairwise-dispersive requires --edges")
        edges = _parse_edges(args.edges)
        p = p_hint if p_hint is not None else max(max(e) for e in edges)
        return Model(name, p,
                     lambda x: penalties.pairwise_dispersive_penalty(x, edges),
                     lambda x: envelopes.pairwise_dispersive_envelope(x, edges))
    raise SystemExit(f"error: unknown model {args.model!r}")


def _add_model_flags(sub) -> None:
    sub.add_argument("--model", required=True, choices=MODELS + tuple(ALIASES))
    sub.add_argument("--groups", help="group file path, or 'appendix'")
    sub.add_argument("--parents", help="comma list of parent pointers, 0 at the root")
    sub.add_argument("--edges", help="comma list of edges like 1-2,2-3")
    sub.add_argument("--delta", type=int, help="refractory spacing (dispersive-l0)")
    sub.add_argument("--G", dest="cover_groups", type=int,
                     help="group budget (sparse-g-cover)")
    sub.add_argument("--variant", choices=("intersection", "cover"),
                     default="intersection")
    sub.add_argument("--p", dest="dim", type=int, help="ambient dimension")


def _format_value(v: float) -> str:
    return "inf" if math.isinf(v) else f"{v:.6f}"


def _cmd_check_tu(args) -> int:
    verdict = is_totally_unimodular(read_int_matrix(args.matrix))
    print(verdict)
    if args.expect_tu and not verdict.is_tu:
        return 1
    return 0


def _cmd_value(args, which: str) -> int:
    x = _parse_vector(args.x)
    model = _build_model(args, p_hint=x.size)
    if x.size != model.p:
        raise SystemExit(f"error: model dimension {model.p} but x has {x.size}")
    value = model.penalty(x) if which == "penalty" else model.envelope(x)
    print(_format_value(value))
    return 1 if math.isinf(value) else 0


def emit_normball(model: Model, resolution: int) -> list[tuple]:
    """Envelope values on a uniform grid over the unit box (p in {2, 3}).

    Returns rows (x_1, ..., x_p, value); infinite values stay inf and are
    rendered as "inf" in the CSV.
    """
    if model.p not in (2, 3):
        raise SystemExit("error: normball sampling needs dimension 2 or 3")
    if resolution < 2:
        raise SystemExit("error: resolution must be at least 2")
    axis = np.linspace(-1.0, 1.0, resolution)
    grids = np.meshgrid(*([axis] * model.p), indexing="ij")
    points = np.stack([g.ravel() for g in grids], axis=1)
    return [tuple(pt) + (model.envelope(pt),) for pt in points]


def _cmd_normball(args) -> int:
    model = _build_model(args, p_hint=args.dim)
    rows = emit_normball(model, args.resolution)
    header = ",".join(f"x{i + 1}" for i in range(model.p)) + ",value"
    lines = [header]
    for row in rows:
        coords = ",".join(f"{v:.6g}" for v in row[:-1])
        val = "inf" if math.isinf(row[-1]) else f"{row[-1]:.6g}"
        lines.append(f"{coords},{val}")
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.levels:
        levels = [float(tok) for tok in args.levels.split(",")]
        for level in levels:
            inside = sum(1 for row in rows if row[-1] <= level + 1e-9)
            print(f"level {level:g}: {inside} of {len(rows)} grid points inside",
                  file=sys.stderr)
    return 0


def _cmd_oracle_check(args) -> int:
    model = _build_model(args, p_hint=args.dim)
    if model.p > oracle.TABULATE_CAP:
        raise SystemExit(f"error: oracle tabulation capped at p={oracle.TABULATE_CAP}")
    table = oracle.tabulate(model.penalty, model.p)
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        x = rng.uniform(-1.0, 1.0, size=model.p)
        env = model.envelope(x)
        bic = oracle.biconjugate(table, x)
        if math.isinf(env) and math.isinf(bic):
            continue
        worst = max(worst, abs(env - bic))
    print(f"max |envelope - biconjugate| over {args.samples} samples: {worst:.3e}")
    return 0 if worst <= args.tol else 1


def _parse_config(path: str) -> recovery.ExperimentConfig:
    raw: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"error: bad config line {line!r}")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()

    kind = raw.get("experiment", "dispersive")
    if kind == "dispersive":
        cfg = recovery.dispersive_experiment_config()
    elif kind == "group-cover":
        cfg = recovery.group_cover_experiment_config()
    else:
        raise SystemExit(f"error: unknown experiment kind {kind!r}")

    def geti(key, default):
        return int(raw[key]) if key in raw else default

    def getf(key, default):
        return float(raw[key]) if key in raw else default

    noise = cfg.noise
    if "noise" in raw:
        noise = replace(noise, kind=raw["noise"])
    noise = replace(noise, nonzeros=geti("noise_k", noise.nonzeros),
                    sigma=getf("sigma", noise.sigma),
                    sigma_is_variance=not bool(geti("sigma_is_std", 0)))
    groups = cfg.groups
    if "groups" in raw:
        groups = appendix_interval_groups() if raw["groups"] == "appendix" \
            else read_group_file(raw["groups"])
    fracs = cfg.fractions
    if "fracs" in raw:
        fracs = tuple(float(tok) for tok in raw["fracs"].split(","))
    solvers = cfg.solvers
    if "solvers" in raw:
        solvers = tuple(tok.strip() for tok in raw["solvers"].split(","))
    cfg = replace(
        cfg, p=geti("p", cfg.p), delta=geti("delta", cfg.delta),
        trials=geti("trials", cfg.trials), base_seed=geti("seed", cfg.base_seed),
        fractions=fracs, solvers=solvers, noise=noise, groups=groups,
        cover_groups=geti("G", cfg.cover_groups),
        per_group_nonzeros=geti("per_group", cfg.per_group_nonzeros),
        sgl_alpha=getf("alpha", cfg.sgl_alpha),
        amplitude=getf("amplitude", cfg.amplitude))
    env_seed = os.environ.get("TUMOD_SEED")
    if env_seed is not None:
        cfg = replace(cfg, base_seed=int(env_seed))
    return cfg


def _cmd_experiment(args) -> int:
    cfg = _parse_config(args.config)

    def progress(rec: recovery.TrialRecord) -> None:
        print(f"{rec.solver} n={rec.n} trial={rec.trial} "
              f"err={rec.rel_err:.4g} ({rec.ms:.0f} ms)", file=sys.stderr)

    records = recovery.run_experiment(cfg, progress=progress if args.verbose else None)
    recovery.write_records_csv(args.out, records)
    means = recovery.mean_errors(records)
    for (solver, frac), err in sorted(means.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        print(f"{solver:9s} frac={frac:<5g} mean_rel_err={err:.6g}")
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tumod",
        description="Structured sparsity over totally unimodular descriptions")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tu = sub.add_parser("check-tu", help="verify total unimodularity of a matrix")
    p_tu.add_argument("--matrix", required=True, help="matrix text file")
    p_tu.add_argument("--expect-tu", action="store_true",
                      help="exit 1 when the matrix is not TU")

    for name in ("penalty", "envelope"):
        p_val = sub.add_parser(name, help=f"evaluate a model {name} at a point")
        _add_model_flags(p_val)
        p_val.add_argument("--x", required=True, help="comma-separated vector")

    p_ball = sub.add_parser("normball", help="sample envelope values on a grid")
    _add_model_flags(p_ball)
    p_ball.add_argument("--resolution", type=int, default=21)
    p_ball.add_argument("--levels", help="comma list; report membership counts")
    p_ball.add_argument("--out", help="CSV path (stdout when omitted)")

    p_orc = sub.add_parser("oracle-check",
                           help="compare an envelope against the biconjugate oracle")
    _add_model_flags(p_orc)
    p_orc.add_argument("--samples", type=int, default=50)
    p_orc.add_argument("--seed", type=int, default=0)
    p_orc.add_argument("--tol", type=float, default=1e-6)

    p_exp = sub.add_parser("experiment", help="run a recovery trial sweep")
    p_exp.add_argument("--config", required=True, help="key=value config file")
    p_exp.add_argument("--out", required=True, help="CSV output path")
    p_exp.add_argument("--verbose", action="store_true")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "check-tu": _cmd_check_tu,
        "penalty": lambda a: _cmd_value(a, "penalty"),
        "envelope": lambda a: _cmd_value(a, "envelope"),
        "normball": _cmd_normball,
        "oracle-check": _cmd_oracle_check,
        "experiment": _cmd_experiment,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
