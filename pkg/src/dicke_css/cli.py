"""Command-line front end tying the numerical modules together.

Every run writes its fully resolved configuration to run_config.json next to
the data files, so any output directory can be reproduced from itself.
Exit codes: 0 success, 2 partial result (e.g. passage tolerance gaps),
1 error.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import css, dicke, io, unraveling
from .entanglement import entropy_dicke

__all__ = ["RunConfig", "parse_config", "run_pipeline", "main"]

SUBCOMMANDS = ("exact", "css-scan", "css-trace", "qt", "qt-scaling", "entropy")


@dataclass
class RunConfig:
    subcommand: str
    options: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"subcommand": self.subcommand, **self.options}


def _add_common(p, precision=False, seed=False):
    p.add_argument("--n", type=int, default=10, help="number of emitters")
    p.add_argument("--gamma", type=float, default=1.0, help="decay rate")
    p.add_argument("--out-dir", type=str, default=None,
                   help="output directory (default: env DICKE_CSS_OUT_DIR or '.')")
    p.add_argument("--config", type=str, default=None,
                   help="JSON config file; flags override file values")
    if precision:
        p.add_argument("--precision", choices=["double", "extended"],
                       default=None,
                       help="linear-solver backend (default: by system size)")
    if seed:
        p.add_argument("--seed", type=int, default=0)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke-css",
        description="Dicke superradiant decay, separable CSS decompositions, "
                    "and low-entanglement quantum trajectories")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("exact", help="exact Dicke populations over time")
    _add_common(p)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--points", type=int, default=1200)

    p = sub.add_parser("css-scan", help="negativity landscape over (t, eta)")
    _add_common(p, precision=True)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--t-points", type=int, default=241)
    p.add_argument("--eta-min", type=float, default=1e-3)
    p.add_argument("--eta-max", type=float, default=1.2)
    p.add_argument("--eta-points", type=int, default=241)

    p = sub.add_parser("css-trace", help="trace a positive passage eta(t)")
    _add_common(p, precision=True)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--t-points", type=int, default=1200)
    p.add_argument("--branch", choices=["lower", "upper"], default="lower")
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("qt", help="quantum trajectory ensemble")
    _add_common(p, seed=True)
    p.add_argument("--dt", type=float, default=None, help="default 1e-3/gamma")
    p.add_argument("--t-max", type=float, default=None, help="default 12/gamma")
    p.add_argument("--strategy",
                   choices=["naive", "phi-random", "phi-opt"], default="naive")
    p.add_argument("--theta-f", type=float, default=math.pi / 4)
    p.add_argument("--ntraj", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--record-stride", type=int, default=10)

    p = sub.add_parser("qt-scaling",
                       help="max-TE / min-Bloch-length scaling over N")
    _add_common(p, seed=True)
    p.add_argument("--n-list", type=str, default="8,16,32",
                   help="comma-separated emitter counts")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--theta-f", type=float, default=math.pi / 4)
    p.add_argument("--ntraj", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--record-stride", type=int, default=10)

    p = sub.add_parser("entropy", help="block entropy of one Dicke state")
    _add_common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-b", type=int, default=None)

    return parser


def parse_config(argv) -> RunConfig:
    """Parse flags, merge an optional JSON config file (flags win)."""
    parser = _build_parser()
    ns = parser.parse_args(argv)
    options = {k: v for k, v in vars(ns).items()
               if k not in ("subcommand", "config")}
    if ns.config is not None:
        with open(ns.config) as fh:
            file_opts = json.load(fh)
        unknown = set(file_opts) - set(options) - {"subcommand"}
        if unknown:
            parser.error(f"unknown config keys: {sorted(unknown)}")
        if file_opts.get("subcommand", ns.subcommand) != ns.subcommand:
            parser.error("config file subcommand does not match command line")
        # flags explicitly given on the command line take precedence
        given = _explicit_flags(argv)
        for k, v in file_opts.items():
            if k != "subcommand" and k not in given:
                options[k] = v
    return RunConfig(subcommand=ns.subcommand, options=options)


def _explicit_flags(argv) -> set:
    flags = set()
    for tok in argv:
        if tok.startswith("--"):
            flags.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    return flags


def _out_dir(options) -> Path:
    out = options.get("out_dir") or os.environ.get("DICKE_CSS_OUT_DIR") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _echo_config(config: RunConfig, out: Path):
    resolved = config.as_dict()
    resolved["out_dir"] = str(out)
    with open(out / "run_config.json", "w") as fh:
        json.dump(resolved, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_time(o, params):
    t_max = o.get("t_max") or 12.0 / params.gamma
    o["t_max"] = t_max
    return t_max


def run_pipeline(config: RunConfig) -> int:
    """Dispatch one subcommand; returns the process exit status."""
    o = config.options
    cmd = config.subcommand

    if cmd == "entropy":
        n = o["n"]
        n_b = o.get("n_b") or n // 2
        o["n_b"] = n_b
        result = {"n": n, "m": o["m"], "n_b": n_b,
                  "entropy_bits": entropy_dicke(n, o["m"], n_b)}
        print(json.dumps(result))
        return 0

    params = dicke.ModelParams(n_emitters=o["n"], gamma=o["gamma"])
    out = _out_dir(o)

    if cmd == "exact":
        t_max = _resolve_time(o, params)
        grid = np.linspace(0.0, t_max, o["points"])
        pops = dicke.evolve_exact(params, grid)
        io.write_populations(out / "populations.csv", pops)
        _echo_config(config, out)
        return 0

    if cmd == "css-scan":
        t_max = _resolve_time(o, params)
        o["precision"] = o.get("precision") or css.default_precision(o["n"])
        t_grid = np.linspace(0.0, t_max, o["t_points"])
        eta_grid = np.linspace(o["eta_min"], o["eta_max"], o["eta_points"])
        field_ = css.scan_landscape(o["n"], t_grid, eta_grid,
                                    precision=o["precision"],
                                    gamma=o["gamma"])
        io.write_landscape(out / "landscape.csv", field_)
        _echo_config(config, out)
        return 0

    if cmd == "css-trace":
        t_max = _resolve_time(o, params)
        o["precision"] = o.get("precision") or css.default_precision(o["n"])
        t_grid = np.linspace(0.0, t_max, o["t_points"])
        curve, decomps = css.trace_passage(o["n"], t_grid, branch=o["branch"],
                                           tol=o["tol"],
                                           precision=o["precision"],
                                           gamma=o["gamma"])
        io.write_passage(out / "passage.csv", curve)
        io.write_css_weights(out / "css_weights.csv", decomps)
        _echo_config(config, out)
        if curve.gaps:
            print(f"tolerance not met at {len(curve.gaps)} times: "
                  f"{[round(t, 6) for t in curve.gaps[:10]]}", file=sys.stderr)
            return 2
        return 0

    if cmd == "qt":
        t_max = _resolve_time(o, params)
        o["dt"] = o.get("dt") or 1e-3 / params.gamma
        stats = unraveling.ensemble_run(
            params, o["dt"], t_max, o["strategy"].replace("-", "_"),
            n_traj=o["ntraj"], seed=o["seed"], workers=o["workers"],
            theta_f=o["theta_f"], record_stride=o["record_stride"])
        io.write_qt_ensemble(out / "qt_ensemble.csv", stats)
        _echo_config(config, out)
        return 0

    if cmd == "qt-scaling":
        o["dt"] = o.get("dt")
        records = []
        n_list = [int(x) for x in str(o["n_list"]).split(",") if x]
        for n in n_list:
            params_n = dicke.ModelParams(n_emitters=n, gamma=o["gamma"])
            t_max = o.get("t_max") or 12.0 / params_n.gamma
            dt = o.get("dt") or 1e-3 / params_n.gamma
            for strategy in unraveling.STRATEGIES:
                stats = unraveling.ensemble_run(
                    params_n, dt, t_max, strategy, n_traj=o["ntraj"],
                    seed=o["seed"], workers=o["workers"],
                    theta_f=o["theta_f"], record_stride=o["record_stride"])
                records.append((n, stats))
        io.write_qt_scaling(out / "qt_scaling.csv", records)
        _echo_config(config, out)
        return 0

    raise ValueError(f"unknown subcommand {cmd!r}")


def main(argv=None) -> int:
    config = parse_config(sys.argv[1:] if argv is None else argv)
    try:
        return run_pipeline(config)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
