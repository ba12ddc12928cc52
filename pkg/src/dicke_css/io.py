"""CSV emission for figure-reproduction pipelines.

All floats are written with 17 significant digits so that re-parsing
round-trips binary64 exactly and outputs are diff-able regression artifacts.
"""

import csv
from pathlib import Path

import numpy as np

__all__ = [
    "write_populations",
    "write_landscape",
    "write_passage",
    "write_css_weights",
    "write_qt_ensemble",
    "write_qt_scaling",
]


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_populations(path, pops_list):
    """Long-format populations: one row per (t, m)."""
    rows = ((_fmt(p.time), m, _fmt(p.probs[m]))
            for p in pops_list for m in range(p.n + 1))
    return _write_rows(path, ["t", "m", "prob"], rows)


def write_landscape(path, field):
    rows = ((_fmt(t), _fmt(eta), _fmt(field.values[i, j]))
            for i, t in enumerate(field.t_grid)
            for j, eta in enumerate(field.eta_grid))
    return _write_rows(path, ["t", "eta", "log10_negativity"], rows)


def write_passage(path, curve):
    rows = ((_fmt(t), _fmt(curve.eta[i]), _fmt(curve.negativity[i]))
            for i, t in enumerate(curve.t_grid))
    return _write_rows(path, ["t", "eta", "negativity"], rows)


def write_css_weights(path, decomps):
    rows = ((_fmt(d.time), a, _fmt(d.thetas[a]), _fmt(d.weights[a]))
            for d in decomps for a in range(d.n + 1))
    return _write_rows(path, ["t", "a", "theta_a", "P_a"], rows)


def write_qt_ensemble(path, stats):
    rows = ((_fmt(t), _fmt(stats.te_mean[i]), _fmt(stats.te_stderr[i]),
             _fmt(stats.xi_mean[i]), _fmt(stats.xi_stderr[i]),
             _fmt(stats.mean_excitation[i]))
            for i, t in enumerate(stats.times))
    return _write_rows(
        path,
        ["t", "te_mean", "te_stderr", "xi_mean", "xi_stderr", "mean_excitation"],
        rows)


def write_qt_scaling(path, records):
    """records: iterable of (n, EnsembleStats)."""
    rows = ((n, s.strategy, _fmt(s.s_max_mean), _fmt(s.s_max_stderr),
             _fmt(s.xi_min_mean), _fmt(s.xi_min_stderr))
            for n, s in records)
    return _write_rows(
        path,
        ["n", "strategy", "s_max_mean", "s_max_stderr",
         "xi_min_mean", "xi_min_stderr"],
        rows)
