"""Discrete-time Kraus-operator quantum trajectories in the symmetric sector.

Three unravelings of the same dissipative channel: the naive operator pair
(trajectories confined to the Dicke basis), a phi-randomized remixing, and a
phi-optimized remixing that minimizes the expected post-operation block
entropy at every step.  All observable statistics agree across strategies;
the trajectory entanglement does not.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _qt_kernels as _k
from .dicke import ModelParams, beta_sq_vector
from .entanglement import SymmetricState, schmidt_amplitude_table

__all__ = [
    "KrausPair",
    "MixingUnitary",
    "TrajectoryRecord",
    "EnsembleStats",
    "STRATEGIES",
    "kraus_naive",
    "remix",
    "qt_step",
    "optimize_phi",
    "bloch_length",
    "run_trajectory",
    "ensemble_run",
]

STRATEGIES = ("naive", "phi_random", "phi_opt")
_STRATEGY_CODE = {
    "naive": _k.STRATEGY_NAIVE,
    "phi_random": _k.STRATEGY_PHI_RANDOM,
    "phi_opt": _k.STRATEGY_PHI_OPT,
}

MAX_DT_GAMMA = 1e-2


class TrajectoryBreakdownError(RuntimeError):
    """Both branch probabilities collapsed below the numerical floor."""


@dataclass(frozen=True)
class KrausPair:
    """Two operators realizing one discretized dissipative timestep."""

    f0: np.ndarray
    f1: np.ndarray
    dt: float
    n: int
    gamma: float
    theta_f: float = 0.0
    phi_f: float = 0.0


@dataclass(frozen=True)
class MixingUnitary:
    """2x2 remixing unitary: a real rotation times opposite phases."""

    theta_f: float
    phi_f: float

    @property
    def matrix(self) -> np.ndarray:
        c, s = math.cos(self.theta_f), math.sin(self.theta_f)
        rot = np.array([[c, s], [-s, c]])
        return rot @ np.diag([np.exp(1j * self.phi_f), np.exp(-1j * self.phi_f)])


@dataclass(frozen=True)
class TrajectoryRecord:
    """Recorded diagnostics of a single trajectory."""

    traj_index: int
    times: np.ndarray
    xi: np.ndarray
    entropy_bits: np.ndarray
    mean_excitation: np.ndarray
    jump_count: int
    seed_info: tuple[int, int]


@dataclass(frozen=True)
class EnsembleStats:
    """Trajectory-averaged time series with standard errors."""

    times: np.ndarray
    te_mean: np.ndarray
    te_stderr: np.ndarray
    xi_mean: np.ndarray
    xi_stderr: np.ndarray
    pops_mean: np.ndarray
    pops_stderr: np.ndarray
    mean_excitation: np.ndarray
    s_max_mean: float
    s_max_stderr: float
    xi_min_mean: float
    xi_min_stderr: float
    n_traj: int
    strategy: str


def kraus_naive(n: int, gamma: float, dt: float) -> KrausPair:
    """No-jump and jump operators of one timestep of collective decay."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 < dt * gamma <= MAX_DT_GAMMA:
        raise ValueError(
            f"dt*gamma must be in (0, {MAX_DT_GAMMA}], got {dt * gamma}")
    bet = beta_sq_vector(n)
    f0 = np.diag(1.0 - dt * gamma * bet / 2.0).astype(complex)
    f1 = np.zeros((n + 1, n + 1), dtype=complex)
    f1[np.arange(n), np.arange(1, n + 1)] = np.sqrt(dt * gamma * bet[1:])
    return KrausPair(f0=f0, f1=f1, dt=dt, n=n, gamma=gamma)


def remix(pair: KrausPair, u: MixingUnitary) -> KrausPair:
    """F_n = sum_k u_nk E_k; the quantum operation is unchanged."""
    um = u.matrix
    if not np.allclose(um.conj().T @ um, np.eye(2), atol=1e-12):
        raise ValueError("mixing matrix is not unitary")
    f0 = um[0, 0] * pair.f0 + um[0, 1] * pair.f1
    f1 = um[1, 0] * pair.f0 + um[1, 1] * pair.f1
    return KrausPair(f0=f0, f1=f1, dt=pair.dt, n=pair.n, gamma=pair.gamma,
                     theta_f=u.theta_f, phi_f=u.phi_f)


def qt_step(state: SymmetricState, pair: KrausPair,
            rng_draw: float) -> tuple[SymmetricState, int]:
    """One stochastic Kraus application with renormalized branch sampling."""
    if not 0.0 <= rng_draw < 1.0:
        raise ValueError(f"rng_draw must be in [0, 1), got {rng_draw}")
    if abs(state.norm_sq() - 1.0) > 1e-9:
        raise ValueError("state must be normalized")
    w0 = pair.f0 @ state.amps
    w1 = pair.f1 @ state.amps
    p0 = float(np.vdot(w0, w0).real)
    p1 = float(np.vdot(w1, w1).real)
    if p0 < 1e-30 and p1 < 1e-30:
        raise TrajectoryBreakdownError(
            f"both branch probabilities below 1e-30 (p0={p0}, p1={p1})")
    if rng_draw < p0 / (p0 + p1):
        out, k = w0 / math.sqrt(p0), 0
    else:
        out, k = w1 / math.sqrt(p1), 1
    return SymmetricState(amps=out, n=state.n), k


def bloch_length(state: SymmetricState) -> float:
    """Mean collective spin length scaled to [0, 1]; exactly 1 on a CSS."""
    n = state.n
    c = state.amps
    m = np.arange(n + 1)
    sz = float(np.dot(m - n / 2.0, np.abs(c) ** 2))
    sminus = complex(np.sum(np.conj(c[:-1]) * c[1:]
                            * np.sqrt(m[1:] * (n - m[1:] + 1))))
    return (2.0 / n) * math.sqrt(sz ** 2 + abs(sminus) ** 2)


def optimize_phi(state: SymmetricState, theta_f: float, pair: KrausPair,
                 grid: int = 16) -> tuple[float, float]:
    """Mixing phase minimizing the expected post-operation block entropy.

    Searches [0, pi) (phi and phi+pi give the same branch states up to sign)
    by coarse grid plus golden-section refinement to 1e-8.
    """
    if grid < 8:
        raise ValueError(f"grid must be >= 8, got {grid}")
    n = pair.n
    nb = n // 2
    table = schmidt_amplitude_table(n, nb)
    u_amp = np.ascontiguousarray(pair.f0 @ state.amps)
    v_amp = np.ascontiguousarray(pair.f1 @ state.amps)
    phi, cost = _k._optimize_phi(u_amp, v_amp, theta_f, table, nb, n - nb,
                                 grid)
    return float(phi % math.pi), float(cost)


def _trajectory_draws(seed: int, traj_indices, n_steps: int) -> np.ndarray:
    """Counter-based per-trajectory streams: Philox keyed on (seed, index)."""
    draws = np.empty((len(traj_indices), n_steps, 2))
    for row, chi in enumerate(traj_indices):
        bits = np.random.Philox(key=np.array([seed, chi], dtype=np.uint64))
        draws[row] = np.random.Generator(bits).random((n_steps, 2))
    return draws


def _run_batch(params: ModelParams, dt: float, n_steps: int, strategy: str,
               theta_f: float, seed: int, traj_indices, record_stride: int,
               grid: int):
    n = params.n_emitters
    nb = n // 2
    bet = beta_sq_vector(n)
    e0diag = 1.0 - dt * params.gamma * bet / 2.0
    e1amp = np.sqrt(dt * params.gamma * bet)
    table = schmidt_amplitude_table(n, nb)
    draws = _trajectory_draws(seed, traj_indices, n_steps)
    n_rec = n_steps // record_stride + 1
    n_traj = len(traj_indices)
    xi = np.empty((n_traj, n_rec))
    ent = np.empty((n_traj, n_rec))
    mexc = np.empty((n_traj, n_rec))
    pops = np.empty((n_traj, n_rec, n + 1))
    jumps = np.empty(n_traj, dtype=np.int64)
    fail = np.empty(n_traj, dtype=np.int64)
    _k.run_batch(n, nb, e0diag, e1amp, table, _STRATEGY_CODE[strategy],
                 theta_f, draws, record_stride, grid,
                 xi, ent, mexc, pops, jumps, fail)
    bad = np.flatnonzero(fail >= 0)
    if bad.size:
        chi = traj_indices[bad[0]]
        raise TrajectoryBreakdownError(
            f"trajectory {chi} (seed {seed}) broke down at step {fail[bad[0]]}")
    return xi, ent, mexc, pops, jumps


def _check_run_args(dt, gamma, t_max, strategy, record_stride):
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected {STRATEGIES}")
    if not 0 < dt * gamma <= MAX_DT_GAMMA:
        raise ValueError(
            f"dt*gamma must be in (0, {MAX_DT_GAMMA}], got {dt * gamma}")
    n_steps = int(round(t_max / dt))
    if n_steps < 1:
        raise ValueError("t_max must cover at least one step")
    if n_steps % record_stride != 0:
        raise ValueError(
            f"step count {n_steps} must be a multiple of record_stride")
    return n_steps


def run_trajectory(params: ModelParams, dt: float, t_max: float, strategy: str,
                   theta_f: float = math.pi / 4, seed: int = 0,
                   traj_index: int = 0,
                   record_stride: int = 10, grid: int = 16) -> TrajectoryRecord:
    """Single trajectory from the fully inverted state, deterministically
    reproducible from (seed, traj_index)."""
    n_steps = _check_run_args(dt, params.gamma, t_max, strategy, record_stride)
    xi, ent, mexc, _pops, jumps, = _run_batch(
        params, dt, n_steps, strategy, theta_f, seed, [traj_index],
        record_stride, grid)
    times = dt * record_stride * np.arange(xi.shape[1])
    return TrajectoryRecord(traj_index=traj_index, times=times, xi=xi[0],
                            entropy_bits=ent[0], mean_excitation=mexc[0],
                            jump_count=int(jumps[0]),
                            seed_info=(seed, traj_index))


def _chunks(n_traj: int, workers: int):
    bounds = np.linspace(0, n_traj, workers + 1).astype(int)
    return [list(range(bounds[i], bounds[i + 1]))
            for i in range(workers) if bounds[i + 1] > bounds[i]]


def ensemble_run(params: ModelParams, dt: float, t_max: float, strategy: str,
                 n_traj: int, seed: int = 0, workers: int = 1,
                 theta_f: float = math.pi / 4, record_stride: int = 10,
                 grid: int = 16) -> EnsembleStats:
    """Trajectory-ensemble averages; bit-identical across worker counts
    because each trajectory owns a counter-based stream keyed on its index."""
    if n_traj < 1:
        raise ValueError(f"n_traj must be >= 1, got {n_traj}")
    n_steps = _check_run_args(dt, params.gamma, t_max, strategy, record_stride)
    chunks = _chunks(n_traj, max(workers, 1))
    args = [(params, dt, n_steps, strategy, theta_f, seed, chunk,
             record_stride, grid) for chunk in chunks]
    if workers > 1 and len(chunks) > 1:
        import concurrent.futures as cf
        with cf.ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_batch_star, args))
    else:
        parts = [_run_batch(*a) for a in args]
    xi = np.concatenate([p[0] for p in parts])
    ent = np.concatenate([p[1] for p in parts])
    mexc = np.concatenate([p[2] for p in parts])
    pops = np.concatenate([p[3] for p in parts])
    times = dt * record_stride * np.arange(xi.shape[1])

    sq = math.sqrt(n_traj)
    def _sem(arr):
        if n_traj == 1:
            return np.zeros(arr.shape[1:])
        return arr.std(axis=0, ddof=1) / sq

    s_max = ent.max(axis=1)
    xi_min = xi.min(axis=1)
    return EnsembleStats(
        times=times,
        te_mean=ent.mean(axis=0), te_stderr=_sem(ent),
        xi_mean=xi.mean(axis=0), xi_stderr=_sem(xi),
        pops_mean=pops.mean(axis=0), pops_stderr=_sem(pops),
        mean_excitation=mexc.mean(axis=0),
        s_max_mean=float(s_max.mean()), s_max_stderr=float(_sem(s_max[:, None])[0]),
        xi_min_mean=float(xi_min.mean()),
        xi_min_stderr=float(_sem(xi_min[:, None])[0]),
        n_traj=n_traj, strategy=strategy)


def _run_batch_star(args):
    return _run_batch(*args)
