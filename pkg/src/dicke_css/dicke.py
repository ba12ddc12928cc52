"""Exact solution of collective (Dicke) decay in the permutation-symmetric sector.

The density matrix stays diagonal in the symmetric basis |m> (m = number of
excited emitters), so the full dynamics reduces to a classical master equation
for the populations rho_m with a bidiagonal, column-stochastic generator.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

__all__ = [
    "ModelParams",
    "DickePopulations",
    "Generator",
    "EvolutionMatrix",
    "beta_sq",
    "build_generator",
    "evolution_matrix",
    "evolve_exact",
    "evolve_ode",
    "emission_rate",
    "default_time_grid",
]


@dataclass(frozen=True)
class ModelParams:
    """Number of emitters and collective decay rate."""

    n_emitters: int
    gamma: float = 1.0

    def __post_init__(self):
        if self.n_emitters < 1:
            raise ValueError(f"n_emitters must be >= 1, got {self.n_emitters}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")


@dataclass(frozen=True)
class DickePopulations:
    """Populations over Dicke states |m>, m = 0..N, at a single time."""

    probs: np.ndarray
    time: float

    @property
    def n(self) -> int:
        return len(self.probs) - 1


@dataclass(frozen=True)
class Generator:
    """Bidiagonal rate matrix of the population master equation.

    diag[m] is the loss rate out of |m| (-Gamma * beta_sq(m)), subflow[m-1]
    the gain rate into |m-1> from |m|; every column sums to zero exactly.
    """

    n: int
    diag: np.ndarray
    subflow: np.ndarray

    def matrix(self) -> np.ndarray:
        """Dense (N+1)x(N+1) matrix acting on population column vectors."""
        d = np.diag(self.diag)
        d += np.diag(self.subflow, k=1)
        return d


@dataclass(frozen=True)
class EvolutionMatrix:
    """Column-stochastic matrix exp(D t) propagating populations to time t."""

    entries: np.ndarray
    time: float


def beta_sq(m: int, n: int) -> float:
    """Normalized collective decay rate m(N-m+1)/N of Dicke state |m>."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0 <= m <= n:
        raise ValueError(f"m must be in [0, {n}], got {m}")
    return m * (n - m + 1) / n


def beta_sq_vector(n: int) -> np.ndarray:
    """beta_sq(m, n) for m = 0..n."""
    m = np.arange(n + 1, dtype=float)
    return m * (n - m + 1) / n


def build_generator(params: ModelParams) -> Generator:
    """Rate matrix implementing d rho_m/dt = Gamma (b_{m+1} rho_{m+1} - b_m rho_m)."""
    n = params.n_emitters
    rates = params.gamma * beta_sq_vector(n)
    return Generator(n=n, diag=-rates, subflow=rates[1:].copy())


def evolution_matrix(gen: Generator, t: float) -> EvolutionMatrix:
    """exp(D t) via scaling-and-squaring.

    D has degenerate eigenvalue pairs (beta_sq(m) = beta_sq(N+1-m)) and is not
    diagonalizable, so an eigendecomposition is not an option here.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return EvolutionMatrix(entries=expm(gen.matrix() * t), time=t)


def _initial_populations(n: int) -> np.ndarray:
    p0 = np.zeros(n + 1)
    p0[n] = 1.0
    return p0


def evolve_exact(params: ModelParams, t_grid) -> list[DickePopulations]:
    """Populations of the fully inverted initial state at each grid time."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("t_grid must not be empty")
    if np.any(t_grid < 0) or np.any(np.diff(t_grid) < 0):
        raise ValueError("t_grid must be sorted and nonnegative")
    gen = build_generator(params)
    n = params.n_emitters
    out = []
    for t in t_grid:
        a_t = evolution_matrix(gen, float(t)).entries
        out.append(DickePopulations(probs=a_t[:, n].copy(), time=float(t)))
    return out


def evolve_ode(params: ModelParams, t_grid, rtol: float = 1e-11,
               atol: float = 1e-13) -> list[DickePopulations]:
    """Same populations via adaptive RK integration (cross-check route)."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise ValueError("t_grid must not be empty")
    d = build_generator(params).matrix()
    sol = solve_ivp(lambda _t, p: d @ p, (0.0, float(t_grid[-1])),
                    _initial_populations(params.n_emitters),
                    t_eval=t_grid, rtol=rtol, atol=atol, method="DOP853")
    return [DickePopulations(probs=sol.y[:, i].copy(), time=float(t))
            for i, t in enumerate(t_grid)]


def emission_rate(pops: DickePopulations, params: ModelParams) -> float:
    """Instantaneous collective photon emission rate Gamma * sum_m b_m rho_m."""
    b = beta_sq_vector(pops.n)
    return float(params.gamma * np.dot(b, pops.probs))


def burst_time(params: ModelParams) -> float:
    """Semiclassical burst time ln(N)/Gamma."""
    return float(np.log(params.n_emitters) / params.gamma)


def default_time_grid(params: ModelParams, t_max: float | None = None,
                      points: int = 1200) -> np.ndarray:
    """Default output grid covering the burst and the late-time tail."""
    if t_max is None:
        t_max = 12.0 / params.gamma
    return np.linspace(0.0, t_max, points)
