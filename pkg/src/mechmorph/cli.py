"""Command-line front end.

Subcommands: simulate, steady, spectrum, branch, sweep, bounds, figure.
Options resolve with the precedence flag > config file > built-in default;
the config file is INI-style with one section per command plus [common].
Every run writes its artifacts plus a manifest.json echoing the fully
resolved configuration, so identical config + seed reproduces the output
byte for byte.  Random perturbations use the seedable PCG64 generator and
are even-symmetrized after sampling.

Exit codes: 0 success, 2 configuration error, 3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import configparser
import os
import sys

import numpy as np

from . import __version__
from .bifurcation import continue_branch, critical_kappas, sweep
from .dynamics import simulate
from .errors import ConfigurationError, MechmorphError
from .figures import FIGURE_KINDS, emit_figure_data
from .energy import bounds
from .grid import Field, make_grid
from .io import (
    bounds_record,
    dump_json,
    ensure_dir,
    spectrum_record,
    steady_record,
    write_branch_csv,
    write_json,
    write_overlays_csv,
    write_state_csv,
    write_sweep_csv,
    write_trajectory_csv,
)
from .model import ModelParams
from .stability import nonlocal_spectrum, spectrum_crosscheck
from .steady import relax_to_steady

# built-in defaults; a config file and then flags override these
DEFAULTS = {
    "common": {"D": 0.01, "kappa": 1.5, "grid": 256, "seed": 0, "out": "mechmorph-out"},
    "simulate": {"t_end": 200.0, "dt": 1e-3, "record_every": 100, "perturb": 0.01,
                 "steady_tol": 1e-9, "init": "cosine"},
    "steady": {"t_end": 500.0, "dt": 1e-3, "init": "cosine", "perturb": 0.01},
    "spectrum": {"t_end": 500.0, "dt": 1e-3, "init": "cosine", "perturb": 0.01,
                 "n_modes": 0},
    "branch": {"n": 1, "step": 0.05, "max_points": 120, "kappa_min": 0.0,
               "kappa_max": 0.0},
    "sweep": {"D_values": "0.005,0.02", "kappa_values": "1.0,1.5,2.0", "trials": 3,
              "t_end": 400.0, "workers": 0},
    "bounds": {},
    "figure": {"kind": "fig1-left", "workers": 1},
}

_CASTS = {
    "grid": int, "seed": int, "record_every": int, "n": int, "max_points": int,
    "trials": int, "workers": int, "n_modes": int,
    "D": float, "kappa": float, "t_end": float, "dt": float, "perturb": float,
    "steady_tol": float, "step": float, "kappa_min": float, "kappa_max": float,
    "out": str, "init": str, "D_values": str, "kappa_values": str, "kind": str,
}


def _resolve(command: str, args: argparse.Namespace) -> dict:
    """Merge defaults, config file values and flags into one plain dict."""
    resolved = dict(DEFAULTS["common"])
    resolved.update(DEFAULTS[command])
    config_path = getattr(args, "config", None)
    if config_path:
        parser = configparser.ConfigParser()
        read = parser.read(config_path)
        if not read:
            raise ConfigurationError(f"config file not found: {config_path}")
        for section in ("common", command):
            if parser.has_section(section):
                for key, raw in parser.items(section):
                    if key not in _CASTS:
                        raise ConfigurationError(f"unknown config key {key!r} in [{section}]")
                    resolved[key] = _CASTS[key](raw)
    for key in resolved:
        flag = getattr(args, key, None)
        if flag is not None:
            resolved[key] = flag
    _validate(resolved)
    return resolved


def _validate(cfg: dict) -> None:
    for key in ("D", "kappa", "t_end", "dt", "step"):
        if key in cfg and not cfg[key] > 0:
            raise ConfigurationError(f"option {key} must be positive, got {cfg[key]}")
    if "perturb" in cfg and cfg["perturb"] < 0:
        raise ConfigurationError(f"option perturb must be >= 0, got {cfg['perturb']}")
    if "grid" in cfg:
        make_grid(cfg["grid"])  # validates power of two >= 8
    for key in ("record_every", "trials", "max_points", "n"):
        if key in cfg and cfg[key] < 1:
            raise ConfigurationError(f"option {key} must be >= 1, got {cfg[key]}")
    if "seed" in cfg and cfg["seed"] < 0:
        raise ConfigurationError(f"seed must be a non-negative integer, got {cfg['seed']}")


def _initial_field(cfg: dict, grid, rng) -> Field:
    kappa = cfg["kappa"]
    if cfg.get("init", "cosine") == "cosine":
        vals = kappa * (1.0 + cfg["perturb"] * np.cos(2.0 * np.pi * grid.nodes))
    elif cfg["init"] == "random":
        noise = rng.standard_normal(grid.n_points)
        coef = np.fft.rfft(noise, norm="forward")
        even = np.fft.irfft(coef.real.astype(complex), grid.n_points, norm="forward")
        even -= even.mean()
        even /= max(np.max(np.abs(even)), 1e-300)
        vals = kappa * (1.0 + cfg["perturb"] * even)
    elif cfg["init"] == "bump":
        bump = np.exp(np.cos(2.0 * np.pi * grid.nodes))
        vals = kappa * bump / bump.mean()
    else:
        raise ConfigurationError(f"unknown init profile {cfg['init']!r}")
    return Field(grid, vals)


def _write_manifest(out: str, command: str, cfg: dict) -> None:
    manifest = {"command": command, "version": __version__, "config": cfg}
    write_json(os.path.join(out, "manifest.json"), manifest)


def _parse_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected a comma-separated list of reals, got {text!r}") from exc


def _cmd_simulate(cfg):
    grid = make_grid(cfg["grid"])
    rng = np.random.Generator(np.random.PCG64(cfg["seed"]))
    params = ModelParams(D=cfg["D"], kappa=cfg["kappa"])
    summary = simulate(
        _initial_field(cfg, grid, rng), params, t_end=cfg["t_end"], dt=cfg["dt"],
        record_every=cfg["record_every"], steady_tol=cfg["steady_tol"],
    )
    out = ensure_dir(cfg["out"])
    write_trajectory_csv(os.path.join(out, "trajectory.csv"), summary)
    write_state_csv(os.path.join(out, "final_state.csv"), summary.final_state)
    return {"converged": summary.converged, "steps": summary.step_count}


def _steady_state_for(cfg):
    grid = make_grid(cfg["grid"])
    rng = np.random.Generator(np.random.PCG64(cfg["seed"]))
    params = ModelParams(D=cfg["D"], kappa=cfg["kappa"])
    return relax_to_steady(
        _initial_field(cfg, grid, rng), params, dt=cfg["dt"], t_end=cfg["t_end"]
    )


def _cmd_steady(cfg):
    state = _steady_state_for(cfg)
    out = ensure_dir(cfg["out"])
    write_json(os.path.join(out, "steady.json"), steady_record(state))
    return {"modality": state.modality, "residual_norm": state.residual_norm}


def _cmd_spectrum(cfg):
    state = _steady_state_for(cfg)
    n_modes = cfg["n_modes"] or None
    report = nonlocal_spectrum(state, n_modes=n_modes)
    check = spectrum_crosscheck(state, n_modes=n_modes)
    out = ensure_dir(cfg["out"])
    write_json(
        os.path.join(out, "spectrum.json"),
        spectrum_record(report, check.max_deviation),
    )
    return {"verdict": report.verdict, "crosscheck_error": check.max_deviation}


def _cmd_branch(cfg):
    bp = critical_kappas(cfg["D"], cfg["n"])[cfg["n"] - 1]
    kappa_range = None
    if cfg["kappa_max"] > 0:
        kappa_range = (cfg["kappa_min"], cfg["kappa_max"])
    branch = continue_branch(
        bp, step=cfg["step"], max_points=cfg["max_points"], kappa_range=kappa_range,
        grid=make_grid(cfg["grid"]),
    )
    out = ensure_dir(cfg["out"])
    write_branch_csv(os.path.join(out, "branch.csv"), branch)
    return {
        "points": len(branch.points),
        "folds": [kf for _, kf in branch.folds],
        "terminated_by": branch.terminated_by,
    }


def _cmd_sweep(cfg):
    workers = cfg["workers"] or (os.cpu_count() or 1)
    result = sweep(
        _parse_list(cfg["D_values"]), _parse_list(cfg["kappa_values"]),
        trials=cfg["trials"], seed=cfg["seed"], t_end=cfg["t_end"], workers=workers,
    )
    out = ensure_dir(cfg["out"])
    write_sweep_csv(os.path.join(out, "sweep.csv"), result)
    write_overlays_csv(os.path.join(out, "overlays.csv"), result)
    return {"cells": len(result.cells)}


def _cmd_bounds(cfg):
    report = bounds(cfg["kappa"])
    out = ensure_dir(cfg["out"])
    write_json(os.path.join(out, "bounds.json"), bounds_record(report))
    return bounds_record(report)


def _cmd_figure(cfg):
    files = emit_figure_data(cfg["kind"], cfg["out"], workers=cfg["workers"], seed=cfg["seed"])
    return {"files": [os.path.basename(f) for f in files]}


COMMANDS = {
    "simulate": _cmd_simulate,
    "steady": _cmd_steady,
    "spectrum": _cmd_spectrum,
    "branch": _cmd_branch,
    "sweep": _cmd_sweep,
    "bounds": _cmd_bounds,
    "figure": _cmd_figure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mechmorph",
        description="Nonlocal mechanochemical pattern formation toolkit",
    )
    parser.add_argument("--version", action="version", version=f"mechmorph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--D", type=float, dest="D")
        p.add_argument("--kappa", type=float)
        p.add_argument("--grid", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", type=str)
        p.add_argument("--config", type=str)

    p = sub.add_parser("simulate", help="integrate the evolution equation")
    common(p)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--record-every", type=int, dest="record_every")
    p.add_argument("--perturb", type=float)
    p.add_argument("--steady-tol", type=float, dest="steady_tol")
    p.add_argument("--init", choices=["cosine", "random", "bump"])

    p = sub.add_parser("steady", help="relax and polish a stationary solution")
    common(p)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--perturb", type=float)
    p.add_argument("--init", choices=["cosine", "random", "bump"])

    p = sub.add_parser("spectrum", help="stability spectrum with cross-check")
    common(p)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--dt", type=float)
    p.add_argument("--perturb", type=float)
    p.add_argument("--init", choices=["cosine", "random", "bump"])
    p.add_argument("--n-modes", type=int, dest="n_modes")

    p = sub.add_parser("branch", help="pseudo-arclength branch continuation")
    common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--step", type=float)
    p.add_argument("--max-points", type=int, dest="max_points")
    p.add_argument("--kappa-min", type=float, dest="kappa_min")
    p.add_argument("--kappa-max", type=float, dest="kappa_max")

    p = sub.add_parser("sweep", help="classify (D, kappa) cells by relaxation")
    common(p)
    p.add_argument("--D-values", type=str, dest="D_values")
    p.add_argument("--kappa-values", type=str, dest="kappa_values")
    p.add_argument("--trials", type=int)
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("bounds", help="variational diffusivity bounds")
    common(p)

    p = sub.add_parser("figure", help="emit the data set for a named figure")
    common(p)
    p.add_argument("--kind", choices=list(FIGURE_KINDS))
    p.add_argument("--workers", type=int)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args.command, args)
        out = ensure_dir(cfg["out"])
        result = COMMANDS[args.command](cfg)
        _write_manifest(out, args.command, cfg)
    except ConfigurationError as exc:
        sys.stderr.write(dump_json({"error": "configuration", "message": str(exc)}) + "\n")
        return 2
    except MechmorphError as exc:
        sys.stderr.write(
            dump_json({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 3
    except OSError as exc:
        sys.stderr.write(dump_json({"error": "io", "message": str(exc)}) + "\n")
        return 4
    summary = {"command": args.command, "out": cfg["out"]}
    summary.update(result)
    sys.stdout.write(dump_json(summary) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
