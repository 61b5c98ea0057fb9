"""Experiment orchestration and the `penduo` command line tool.

Cases mirror the experiments: `elliptic` (static penalty comparison),
`uzawa-demo` (penalty-duality on the static model), `advdiff` and
`burgers` (transient immersed-structure runs), `rates` (epsilon-sweep
convergence study).  Each run directory receives the resolved config, CSV
artifacts, rendered figures and a summary.json.

Config precedence: built-in defaults < preset < config file < flags.
Config files are flat `key = value` lines with `#` comments.
"""

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .core import Mesh1D, PenaltyConfig
from .diagnostics import (
    DEFAULT_EPS_SWEEP,
    elliptic_error_table,
    interface_flux,
    rate_slopes,
)
from .elliptic1d import (
    EllipticProblem,
    exact_limit_solution,
    solve_penalized_elliptic,
)
from .saddle import EllipticInterfaceProblem, uzawa_iterate
from .transport1d import (
    RigidMotion,
    StructureRegion,
    TransportParams,
    initial_condition,
    run_transient,
)

CASES = ("elliptic", "advdiff", "burgers", "rates", "uzawa-demo")


class ParseError(Exception):
    pass


class ValidationError(Exception):
    pass


@dataclass
class ExperimentConfig:
    case: str = "advdiff"
    length: float = 1.0
    nodes: int | None = None  # space steps (transport) / node count (elliptic)
    u0: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 1.0
    eps: float = 1e-3
    r: float = 10.0
    duality: bool = False
    interior_penalty: bool = True
    bc: str = "wrap"
    warm_start: bool = False
    nu: float = 0.001
    c: float = 1.0
    t_final: float = 2.0
    n_steps: int = 1000
    x_a: float = 0.45
    x_b: float = 0.55
    out: str | None = None
    stride: int = 10
    eps_sweep: tuple | None = None
    tol: float = 1e-10
    cfl_limit: float = 1.0
    plots: bool = True
    explicit: set = field(default_factory=set)

    @property
    def dt(self) -> float:
        return self.t_final / self.n_steps

    def resolved_nodes(self) -> int:
        if self.nodes is not None:
            return self.nodes
        return 1001 if self.case in ("elliptic", "rates", "uzawa-demo") else 500


_BOOL_WORDS = {"on": True, "true": True, "1": True, "yes": True,
               "off": False, "false": False, "0": False, "no": False}

_FIELD_PARSERS = {
    "case": str,
    "length": float,
    "nodes": int,
    "u0": float,
    "alpha": float,
    "beta": float,
    "gamma": float,
    "eps": float,
    "r": float,
    "duality": "bool",
    "interior_penalty": "bool",
    "bc": str,
    "warm_start": "bool",
    "nu": float,
    "c": float,
    "t_final": float,
    "n_steps": int,
    "x_a": float,
    "x_b": float,
    "out": str,
    "stride": int,
    "eps_sweep": "floats",
    "tol": float,
    "cfl_limit": float,
    "plots": "bool",
}


def _parse_value(key: str, raw: str, where: str):
    kind = _FIELD_PARSERS[key]
    try:
        if kind == "bool":
            word = raw.strip().lower()
            if word not in _BOOL_WORDS:
                raise ValueError(f"not a boolean: {raw!r}")
            return _BOOL_WORDS[word]
        if kind == "floats":
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        return kind(raw.strip())
    except ValueError as exc:
        raise ParseError(f"{where}: bad value for {key}: {exc}") from None


def parse_config_file(path: str) -> dict:
    """Read flat key=value lines; '#' starts a comment."""
    if not os.path.exists(path):
        raise ParseError(f"config file not found: {path}")
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ParseError(f"{path}:{lineno}: expected key=value, got {line.rstrip()!r}")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            if key not in _FIELD_PARSERS:
                raise ParseError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _parse_value(key, raw, f"{path}:{lineno}")
    return values


# paper-scenario presets: (case, overrides)
PRESETS = {
    "fig1": ("elliptic", {"eps_sweep": (0.1,)}),
    "fig2": ("elliptic", {"eps_sweep": (0.01,)}),
    "fig4": ("uzawa-demo", {"eps": 0.1, "r": 10.0}),
    "fig10": ("advdiff", {"duality": False, "interior_penalty": False}),
    "fig12": ("advdiff", {"duality": True, "interior_penalty": False}),
    "fig13bis": ("advdiff", {"duality": False, "interior_penalty": True}),
    "fig15": ("advdiff", {"duality": True, "interior_penalty": True}),
    "fig201": ("burgers", {"duality": False, "interior_penalty": False,
                           "r": 0.1, "cfl_limit": 1.2}),
    "fig204": ("burgers", {"duality": True, "interior_penalty": False,
                           "cfl_limit": 1.2}),
    "fig208": ("burgers", {"duality": False, "interior_penalty": True,
                           "cfl_limit": 1.2}),
    "fig211": ("burgers", {"duality": True, "interior_penalty": True,
                           "cfl_limit": 1.2}),
    "fig215": ("burgers", {"duality": True, "interior_penalty": True,
                           "eps": 1e-8, "nodes": 1000, "n_steps": 4000,
                           "cfl_limit": 1.2}),
}


def load_config(case: str, config_path: str | None = None,
                flag_values: dict | None = None,
                preset: str | None = None) -> ExperimentConfig:
    """Resolve a config: defaults < preset < file < flags."""
    cfg = ExperimentConfig(case=case)
    explicit = set()

    if preset is not None:
        if preset not in PRESETS:
            raise ValidationError(f"unknown preset {preset!r}")
        preset_case, overrides = PRESETS[preset]
        if preset_case != case:
            raise ValidationError(
                f"preset {preset} belongs to case {preset_case}, not {case}"
            )
        for key, value in overrides.items():
            setattr(cfg, key, value)
            explicit.add(key)

    if config_path is not None:
        for key, value in parse_config_file(config_path).items():
            if key == "case":
                continue
            setattr(cfg, key, value)
            explicit.add(key)

    for key, value in (flag_values or {}).items():
        if value is None:
            continue
        setattr(cfg, key, value)
        explicit.add(key)

    cfg.explicit = explicit
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig):
    if cfg.case not in CASES:
        raise ValidationError(f"unknown case {cfg.case!r}")
    if cfg.eps <= 0.0:
        raise ValidationError(f"eps must be positive, got {cfg.eps}")
    if cfg.r <= 0.0:
        raise ValidationError(f"r must be positive, got {cfg.r}")
    if min(cfg.alpha, cfg.beta, cfg.gamma) < 0.0:
        raise ValidationError("penalty weights must be nonnegative")
    if cfg.x_a >= cfg.x_b:
        raise ValidationError(f"need x_a < x_b, got x_a={cfg.x_a}, x_b={cfg.x_b}")
    if not (0.0 < cfg.x_a and cfg.x_b < cfg.length):
        raise ValidationError("structure must lie strictly inside the domain")
    if cfg.resolved_nodes() < 3:
        raise ValidationError("need at least 3 nodes / space steps")
    if cfg.case in ("advdiff", "burgers"):
        if cfg.n_steps < 1 or cfg.t_final <= 0.0:
            raise ValidationError("transient cases need n_steps >= 1, t_final > 0")
        dx = cfg.length / cfg.resolved_nodes()
        if cfg.case == "advdiff":
            cfl = abs(cfg.c) * cfg.dt / dx
            if cfl > cfg.cfl_limit + 1e-12:
                raise ValidationError(
                    f"CFL {cfl:.4g} exceeds limit {cfg.cfl_limit} "
                    f"(reduce dt or refine in time)"
                )
    if cfg.eps_sweep is not None and any(e <= 0.0 for e in cfg.eps_sweep):
        raise ValidationError("eps_sweep values must be positive")


# ---------------------------------------------------------------------------
# serialization helpers

def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def echo_config(cfg: ExperimentConfig, out_dir: str):
    lines = [f"# resolved configuration for case {cfg.case}"]
    for f in fields(cfg):
        if f.name in ("explicit",):
            continue
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if isinstance(value, bool):
            value = "on" if value else "off"
        elif isinstance(value, tuple):
            value = ",".join(_fmt(v) for v in value)
        lines.append(f"{f.name} = {value}")
    with open(os.path.join(out_dir, "config.txt"), "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _solution_rows(mesh, snapshots, stride_steps=None):
    rows = []
    for idx, (t, u) in enumerate(snapshots):
        step = idx if stride_steps is None else stride_steps[idx]
        for node, (x, v) in enumerate(zip(mesh.nodes, u)):
            rows.append([step, _fmt(t), node, _fmt(x), _fmt(v)])
    return rows


# ---------------------------------------------------------------------------
# cases

ELLIPTIC_VARIANTS = {
    "alpha": (1.0, 0.0, 0.0),
    "beta": (0.0, 1.0, 0.0),
    "gamma": (0.0, 0.0, 1.0),
    "alpha_beta": (1.0, 1.0, 0.0),
}


def run_elliptic(cfg: ExperimentConfig, out_dir: str) -> dict:
    from . import plots

    mesh = Mesh1D(cfg.length, cfg.resolved_nodes())
    eps_list = cfg.eps_sweep if cfg.eps_sweep else (
        (cfg.eps,) if "eps" in cfg.explicit else (0.1, 0.01)
    )
    custom = any(k in cfg.explicit for k in ("alpha", "beta", "gamma"))
    if custom:
        variants = {"custom": (cfg.alpha, cfg.beta, cfg.gamma)}
    else:
        variants = ELLIPTIC_VARIANTS

    summary = {"case": "elliptic", "eps": list(eps_list), "variants": {}}
    for eps in eps_list:
        curves = {}
        for name, (a, b, g) in variants.items():
            pen = PenaltyConfig(alpha=a, beta=b, gamma=g, eps=eps, r=cfg.r)
            u = solve_penalized_elliptic(EllipticProblem(mesh, pen, cfg.u0))
            curves[name] = u
            tag = f"{name}_eps{_fmt(eps)}"
            write_csv(
                os.path.join(out_dir, f"solution_{tag}.csv"),
                ["step", "time", "node", "x", "u"],
                _solution_rows(mesh, [(0.0, u)]),
            )
            mid = mesh.midpoint_index
            summary["variants"][tag] = {
                "interface_value": u[mid],
                "max_structure_gap": float(np.max(np.abs(u[mid:] - cfg.u0))),
            }
        if cfg.plots:
            plots.save_profiles(
                mesh.nodes, curves,
                os.path.join(out_dir, f"solution_eps{_fmt(eps)}.png"),
                title=f"penalty variants, eps={eps:g}",
            )
    return summary


def run_uzawa_demo(cfg: ExperimentConfig, out_dir: str) -> dict:
    from . import plots

    mesh = Mesh1D(cfg.length, cfg.resolved_nodes())
    r = cfg.r if "r" in cfg.explicit or "eps" not in cfg.explicit else 1.0 / cfg.eps
    problem = EllipticInterfaceProblem(mesh, u0=cfg.u0, r=r)
    result = uzawa_iterate(problem, r=r, lam0=np.zeros(1), tol=cfg.tol, max_iter=200)

    rows = []
    for p, rho in enumerate(result.residual_history):
        lam = result.multiplier_history[min(p, len(result.multiplier_history) - 1)]
        rows.append([p, _fmt(0.0), _fmt(lam[0]), _fmt(0.0), p, _fmt(rho)])
    write_csv(
        os.path.join(out_dir, "multipliers.csv"),
        ["step", "time", "lambda_a", "lambda_b", "uzawa_iters", "residual"],
        rows,
    )
    write_csv(
        os.path.join(out_dir, "solution.csv"),
        ["step", "time", "node", "x", "u"],
        _solution_rows(mesh, [(0.0, result.state)]),
    )
    mid = mesh.midpoint_index
    write_csv(
        os.path.join(out_dir, "stress.csv"),
        ["step", "time", "flux_a", "flux_b"],
        [[0, _fmt(0.0),
          _fmt(interface_flux(result.state, mesh, mid, "left")),
          _fmt(interface_flux(result.state, mesh, mid, "right"))]],
    )
    limit = exact_limit_solution(mesh, cfg.u0, "constraint_active")
    if cfg.plots:
        plots.save_profiles(
            mesh.nodes,
            {"penalty-duality": result.state, "limit": limit},
            os.path.join(out_dir, "solution.png"),
            title=f"penalty-duality solution, r={r:g}",
        )
        plots.save_series(
            list(range(len(result.residual_history))),
            {"constraint residual": result.residual_history},
            os.path.join(out_dir, "residuals.png"),
            ylabel="|u(L/2) - u0|",
        )
    return {
        "case": "uzawa-demo",
        "r": r,
        "iterations": result.iterations,
        "converged": result.converged,
        "final_residual": result.residual_history[-1],
        "multiplier": float(result.multiplier[0]),
        "state_error_vs_limit": float(np.max(np.abs(result.state - limit))),
    }


def _transport_setup(cfg: ExperimentConfig):
    n_cells = cfg.resolved_nodes()
    mesh = Mesh1D(cfg.length, n_cells + 1)
    structure = StructureRegion.from_bounds(mesh, cfg.x_a, cfg.x_b)
    motion = RigidMotion.for_structure(structure, cfg.length)
    params = TransportParams(
        nu=cfg.nu,
        c=cfg.c,
        dt=cfg.dt,
        n_steps=cfg.n_steps,
        bc_mode="exact_periodic" if cfg.bc == "wrap" else "penalized_periodic",
        scheme="duality" if cfg.duality else "penalty_only",
        interior_gamma_on=cfg.interior_penalty,
        warm_start=cfg.warm_start,
        cfl_limit=cfg.cfl_limit,
    )
    penalty = PenaltyConfig(
        alpha=cfg.alpha, beta=cfg.beta, gamma=cfg.gamma, eps=cfg.eps, r=cfg.r
    )
    u_init = initial_condition(mesh.nodes, structure, cfg.length)
    return mesh, params, structure, motion, penalty, u_init


def run_transport(cfg: ExperimentConfig, out_dir: str) -> dict:
    from . import plots

    kind = cfg.case
    mesh, params, structure, motion, penalty, u_init = _transport_setup(cfg)
    traj = run_transient(
        kind, mesh, params, structure, motion, penalty, u_init,
        uzawa_tol=cfg.tol, snapshot_stride=cfg.stride,
    )

    stride_steps = [0] + [
        int(round(t / params.dt)) for t, _ in traj.snapshots[1:]
    ]
    write_csv(
        os.path.join(out_dir, "solution.csv"),
        ["step", "time", "node", "x", "u"],
        _solution_rows(mesh, traj.snapshots, stride_steps),
    )
    residuals = dict((round(t, 12), rho) for t, rho in traj.residual_series)
    mult_rows = []
    for t, lam, iters in traj.multiplier_series:
        step = int(round(t / params.dt))
        rho = residuals.get(round(t, 12), 0.0)
        mult_rows.append(
            [step, _fmt(t), _fmt(lam[0]), _fmt(lam[1]), iters, _fmt(rho)]
        )
    write_csv(
        os.path.join(out_dir, "multipliers.csv"),
        ["step", "time", "lambda_a", "lambda_b", "uzawa_iters", "residual"],
        mult_rows,
    )
    write_csv(
        os.path.join(out_dir, "stress.csv"),
        ["step", "time", "flux_a", "flux_b"],
        [[int(round(t / params.dt)), _fmt(t), _fmt(fa), _fmt(fb)]
         for t, fa, fb in traj.flux_series],
    )
    if cfg.plots:
        plots.save_waterfall(
            mesh.nodes, traj.snapshots,
            os.path.join(out_dir, "solution.png"),
            title=f"{kind}, {'duality' if cfg.duality else 'penalty'}",
        )
        if traj.flux_series:
            ts = [t for t, _, _ in traj.flux_series]
            plots.save_series(
                ts,
                {"flux at x_a": [fa for _, fa, _ in traj.flux_series],
                 "flux at x_b": [fb for _, _, fb in traj.flux_series]},
                os.path.join(out_dir, "stress.png"),
                ylabel="nu du/dx",
            )
        if cfg.duality and traj.multiplier_series:
            ts = [t for t, _, _ in traj.multiplier_series]
            plots.save_series(
                ts,
                {"lambda_a": [lam[0] for _, lam, _ in traj.multiplier_series],
                 "lambda_b": [lam[1] for _, lam, _ in traj.multiplier_series]},
                os.path.join(out_dir, "multipliers.png"),
                ylabel="lambda",
            )
    final = traj.final_state
    summary = {
        "case": kind,
        "duality": cfg.duality,
        "final_time": cfg.t_final,
        "final_min": float(np.min(final)),
        "final_max": float(np.max(final)),
        "failed_steps": len(traj.failed_steps),
    }
    if cfg.duality and traj.residual_series:
        summary["max_interface_residual"] = max(r for _, r in traj.residual_series)
        summary["max_uzawa_iterations"] = max(i for _, _, i in traj.multiplier_series)
    return summary


def run_rates(cfg: ExperimentConfig, out_dir: str) -> dict:
    from . import plots

    mesh = Mesh1D(cfg.length, cfg.resolved_nodes())
    custom = any(k in cfg.explicit for k in ("alpha", "beta", "gamma"))
    template = PenaltyConfig(
        alpha=cfg.alpha if custom else 1.0,
        beta=cfg.beta if custom else 0.0,
        gamma=cfg.gamma if custom else 0.0,
        eps=1.0,
        r=cfg.r,
    )
    eps_list = cfg.eps_sweep if cfg.eps_sweep else DEFAULT_EPS_SWEEP
    rows = elliptic_error_table(template, eps_list, mesh, cfg.u0)
    slopes = rate_slopes(rows)

    # mesh-refinement control at the sharpest eps: discretization error must
    # stay below the penalty error for the fitted slopes to be meaningful
    fine_mesh = Mesh1D(cfg.length, 2 * (mesh.n_nodes - 1) + 1)
    fine = elliptic_error_table(template, (min(eps_list),), fine_mesh, cfg.u0)
    coarse = [row for row in rows if row["eps"] == min(eps_list)][0]
    ref_ratio = {
        key: abs(fine[0][key] - coarse[key]) / coarse[key]
        for key in slopes
        if coarse[key] > 0.0
    }

    header = ["eps", "err_l2_S", "err_l2_whole", "err_h1_fluid",
              "err_interface", "err_flux"]
    csv_rows = [[_fmt(row["eps"])] + [_fmt(row[k]) for k in header[1:]]
                for row in rows]
    csv_rows.append(["slope"] + [_fmt(slopes[k]) for k in header[1:]])
    write_csv(os.path.join(out_dir, "rates.csv"), header, csv_rows)
    if cfg.plots:
        plots.save_rate_plot(
            rows, slopes, os.path.join(out_dir, "rates.png"),
            title=f"alpha={template.alpha:g} beta={template.beta:g} "
                  f"gamma={template.gamma:g}",
        )
    return {
        "case": "rates",
        "penalty": {"alpha": template.alpha, "beta": template.beta,
                    "gamma": template.gamma},
        "slopes": slopes,
        "mesh_refinement_change": ref_ratio,
    }


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Run one case, writing all artifacts into the output directory."""
    out_root = os.environ.get("PENDUO_OUT", "penduo_out")
    out_dir = cfg.out if cfg.out else os.path.join(out_root, cfg.case)
    os.makedirs(out_dir, exist_ok=True)
    echo_config(cfg, out_dir)

    started = time.perf_counter()
    runner = {
        "elliptic": run_elliptic,
        "uzawa-demo": run_uzawa_demo,
        "advdiff": run_transport,
        "burgers": run_transport,
        "rates": run_rates,
    }[cfg.case]
    summary = runner(cfg, out_dir)
    summary["wall_time_s"] = time.perf_counter() - started
    summary["out_dir"] = out_dir
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


# ---------------------------------------------------------------------------
# argument parsing

def _add_common_flags(sp):
    sp.add_argument("--config", help="flat key=value config file")
    sp.add_argument("--preset", help="paper-scenario preset: " + ", ".join(PRESETS))
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--eps", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--nodes", type=int)
    sp.add_argument("--steps", type=int, dest="n_steps")
    sp.add_argument("--t-final", type=float, dest="t_final")
    sp.add_argument("--nu", type=float)
    sp.add_argument("--c", type=float)
    sp.add_argument("--u0", type=float)
    sp.add_argument("--duality", choices=["on", "off"])
    sp.add_argument("--interior-penalty", choices=["on", "off"],
                    dest="interior_penalty")
    sp.add_argument("--bc", choices=["wrap", "penalized"])
    sp.add_argument("--warm-start", choices=["on", "off"], dest="warm_start")
    sp.add_argument("--xa", type=float, dest="x_a")
    sp.add_argument("--xb", type=float, dest="x_b")
    sp.add_argument("--out")
    sp.add_argument("--stride", type=int)
    sp.add_argument("--eps-sweep", dest="eps_sweep",
                    help="comma-separated eps values")
    sp.add_argument("--tol", type=float)
    sp.add_argument("--cfl-limit", type=float, dest="cfl_limit")
    sp.add_argument("--no-plots", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="penduo",
        description="Penalty and penalty-duality solvers for 1D "
                    "immersed-structure problems.",
        epilog="Presets: " + ", ".join(sorted(PRESETS)) +
               ". Output root: $PENDUO_OUT (default ./penduo_out).",
    )
    sub = parser.add_subparsers(dest="case", required=True)
    for case in CASES:
        sp = sub.add_parser(case, help=f"run the {case} experiment")
        _add_common_flags(sp)
    return parser


def _flags_from_args(args) -> dict:
    flag_values = {}
    for key in ("alpha", "beta", "gamma", "eps", "r", "nodes", "n_steps",
                "t_final", "nu", "c", "u0", "bc", "x_a", "x_b", "out",
                "stride", "tol", "cfl_limit"):
        flag_values[key] = getattr(args, key)
    for key in ("duality", "interior_penalty", "warm_start"):
        raw = getattr(args, key)
        flag_values[key] = None if raw is None else raw == "on"
    if args.eps_sweep is not None:
        flag_values["eps_sweep"] = _parse_value("eps_sweep", args.eps_sweep, "--eps-sweep")
    if args.no_plots:
        flag_values["plots"] = False
    return flag_values


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(
            args.case,
            config_path=args.config,
            flag_values=_flags_from_args(args),
            preset=args.preset,
        )
    except (ParseError, ValidationError) as exc:
        print(f"penduo: {exc}", file=sys.stderr)
        return 1
    try:
        summary = run_experiment(cfg)
    except (ParseError, ValidationError) as exc:
        print(f"penduo: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - one-line diagnostic per contract
        print(f"penduo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
