"""Coherent-spin-state decompositions of the Dicke decay state.

The diagonal Dicke-basis state at time t is re-expanded as a weighted set of
CSS rings with equally spaced polar angles theta_a = eta * a * pi / N.  The
weights solve a Bernstein-type linear system, which becomes exponentially
ill-conditioned with N; an extended (double-double) backend keeps the solves
meaningful up to N ~ 50.  A vanishing negativity of the weight vector
certifies the state as a separable CSS mixture.
"""

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import doubledouble as dd
from .dicke import DickePopulations
from .doubledouble import DD_EPS, _add, _mul, _two_sum

__all__ = [
    "IllConditionedError",
    "MappingMatrix",
    "CssDecomposition",
    "NegativityField",
    "EtaCurve",
    "build_mapping",
    "solve_css",
    "negativity",
    "eta_analytic_n2",
    "scan_landscape",
    "trace_passage",
    "reconstruct_rho",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class IllConditionedError(np.linalg.LinAlgError):
    """Mapping matrix numerically singular at the requested precision."""

    def __init__(self, n: int, eta: float, cond: float, precision: str):
        self.cond = cond
        super().__init__(
            f"mapping matrix N={n}, eta={eta} has condition estimate "
            f"{cond:.2e}, beyond {precision} precision")


@dataclass(frozen=True)
class MappingMatrix:
    """CSS-ring to Dicke-population mapping at spacing parameter eta.

    Rows are indexed by the ground-state count d = N - m; columns by the ring
    index a.  Columns sum to one by the binomial theorem.
    """

    n: int
    eta: float
    thetas: np.ndarray
    z: np.ndarray
    entries: np.ndarray
    precision: str = "double"
    # trailing parts when built at extended precision; entries is the hi part
    entries_lo: np.ndarray | None = None

    def dd_parts(self) -> tuple[np.ndarray, np.ndarray]:
        if self.entries_lo is None:
            return self.entries, np.zeros_like(self.entries)
        return self.entries, self.entries_lo


@dataclass(frozen=True)
class CssDecomposition:
    """Solved CSS weight vector for one (t, eta) point."""

    weights: np.ndarray
    eta: float
    time: float
    negativity: float
    residual: float
    precision: str = "double"
    # trailing parts of an extended-precision solve; weights is the hi part
    weights_lo: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.weights) - 1

    @property
    def thetas(self) -> np.ndarray:
        return self.eta * np.arange(self.n + 1) * np.pi / self.n


@dataclass(frozen=True)
class NegativityField:
    """log10-negativity over a (t, eta) grid, clamped to [-10, 0]."""

    t_grid: np.ndarray
    eta_grid: np.ndarray
    values: np.ndarray
    warnings: int = 0


@dataclass(frozen=True)
class EtaCurve:
    """A traced positive passage eta(t) with its achieved negativities."""

    t_grid: np.ndarray
    eta: np.ndarray
    negativity: np.ndarray
    branch: str
    gaps: tuple = ()


def _binomials(n: int) -> np.ndarray:
    return np.array([math.comb(n, d) for d in range(n + 1)], dtype=np.float64)


def _z_of_eta(n: int, eta: float) -> tuple[np.ndarray, np.ndarray]:
    a = np.arange(n + 1, dtype=float)
    thetas = eta * a * np.pi / n
    return thetas, np.cos(thetas / 2.0) ** 2


@njit(cache=True)
def _mapping_dd(z, binom, m_hi, m_lo):
    """Fill the mapping matrix in double-double; columns sum to 1 up to DD_EPS."""
    n = z.shape[0] - 1
    for a in range(n + 1):
        zh, zl = z[a], 0.0
        wh, wl = _two_sum(1.0, -z[a])
        # zp = z^(n-d), wp = w^d accumulated along the column
        zp_h = np.empty(n + 1)
        zp_l = np.empty(n + 1)
        ph, pl = 1.0, 0.0
        for k in range(n + 1):
            zp_h[k] = ph
            zp_l[k] = pl
            ph, pl = _mul(ph, pl, zh, zl)
        ph, pl = 1.0, 0.0
        for d_idx in range(n + 1):
            eh, el = _mul(zp_h[n - d_idx], zp_l[n - d_idx], ph, pl)
            eh, el = _mul(eh, el, binom[d_idx], 0.0)
            m_hi[d_idx, a] = eh
            m_lo[d_idx, a] = el
            ph, pl = _mul(ph, pl, wh, wl)


def build_mapping(n: int, eta: float, precision: str = "double") -> MappingMatrix:
    """Mapping matrix M[d, a] = C(N,d) z_a^(N-d) (1-z_a)^d, z_a = cos^2(theta_a/2)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not eta > 0:
        raise ValueError(f"eta must be > 0, got {eta}")
    if precision not in ("double", "extended"):
        raise ValueError(f"unknown precision {precision!r}")
    thetas, z = _z_of_eta(n, eta)
    binom = _binomials(n)
    if precision == "extended":
        m_hi = np.empty((n + 1, n + 1))
        m_lo = np.empty((n + 1, n + 1))
        _mapping_dd(z, binom, m_hi, m_lo)
        return MappingMatrix(n=n, eta=eta, thetas=thetas, z=z,
                             entries=m_hi, precision=precision,
                             entries_lo=m_lo)
    d_idx = np.arange(n + 1)[:, None]
    entries = binom[:, None] * z[None, :] ** (n - d_idx) * (1.0 - z)[None, :] ** d_idx
    return MappingMatrix(n=n, eta=eta, thetas=thetas, z=z, entries=entries)


def negativity(p) -> float:
    """Total magnitude of the negative weight entries, -sum_a min(P_a, 0)."""
    p = np.asarray(p, dtype=float)
    return float(-np.minimum(p, 0.0).sum())


def _truncate_rho(probs: np.ndarray, precision: str) -> np.ndarray:
    # drop populations below the relative machine precision of the backend
    eps = 1e-16 if precision == "double" else DD_EPS
    out = probs.copy()
    out[np.abs(out) < eps * np.abs(out).max()] = 0.0
    return out


def default_precision(n: int) -> str:
    """Extended above N = 20, where double-precision solves degrade."""
    return "extended" if n > 20 else "double"


def solve_css(rho: DickePopulations, eta: float,
              precision: str | None = None) -> CssDecomposition:
    """Solve M P = rho (re-indexed by ground-state count) for the CSS weights."""
    n = rho.n
    if precision is None:
        precision = default_precision(n)
    mapping = build_mapping(n, eta, precision)
    rho_d = _truncate_rho(np.asarray(rho.probs, dtype=float)[::-1], precision)
    if precision == "double":
        cond = np.linalg.cond(mapping.entries, 1)
        if not np.isfinite(cond) or cond > 1e16:
            raise IllConditionedError(n, eta, cond, precision)
        weights = np.linalg.solve(mapping.entries, rho_d)
        m_hi, m_lo = mapping.entries, np.zeros_like(mapping.entries)
        res = dd.residual_max(m_hi, m_lo, weights, np.zeros_like(weights),
                              rho_d, np.zeros_like(rho_d))
        neg = negativity(weights)
    else:
        m_hi, m_lo = mapping.dd_parts()
        bl = np.zeros_like(rho_d)
        try:
            xh, xl = dd.lu_solve(m_hi, m_lo, rho_d, bl)
        except np.linalg.LinAlgError:
            cond = float(np.linalg.cond(mapping.entries, 1))
            raise IllConditionedError(n, eta, cond, precision) from None
        res = dd.residual_max(m_hi, m_lo, xh, xl, rho_d, bl)
        neg = float(-np.minimum(xh + xl, 0.0).sum())
        return CssDecomposition(weights=xh, eta=eta, time=rho.time,
                                negativity=neg, residual=res,
                                precision=precision, weights_lo=xl)
    return CssDecomposition(weights=weights, eta=eta, time=rho.time,
                            negativity=neg, residual=res, precision=precision)


@njit(cache=True)
def _matvec_dd(m_hi, m_lo, xh, xl, out):
    npts = m_hi.shape[0]
    for d_row in range(npts):
        sh, sl = 0.0, 0.0
        for a in range(npts):
            ph, pl = _mul(m_hi[d_row, a], m_lo[d_row, a], xh[a], xl[a])
            sh, sl = _add(sh, sl, ph, pl)
        out[d_row] = sh + sl


def reconstruct_rho(decomp: CssDecomposition) -> DickePopulations:
    """M P re-indexed back to excitation count (round-trip verification).

    Extended-precision decompositions are multiplied out in double-double so
    the result is correctly rounded; the decomposition's `residual` field
    carries the unrounded deviation."""
    mapping = build_mapping(decomp.n, decomp.eta, decomp.precision)
    if decomp.weights_lo is not None and decomp.precision == "extended":
        m_hi, m_lo = mapping.dd_parts()
        rho_d = np.empty(decomp.n + 1)
        _matvec_dd(m_hi, m_lo, decomp.weights, decomp.weights_lo, rho_d)
    else:
        rho_d = mapping.entries @ decomp.weights
    return DickePopulations(probs=rho_d[::-1].copy(), time=decomp.time)


def eta_analytic_n2(t: float, gamma: float = 1.0,
                    zero_at_origin: bool = False) -> float:
    """Closed-form lower-passage spacing parameter for two emitters."""
    if t <= 0:
        if t == 0 and zero_at_origin:
            return 0.0
        raise ValueError(f"t must be > 0, got {t}")
    x = t * gamma
    ex = math.exp(-x)
    num = x * ex
    den = 2.0 * (1.0 - ex) - x * ex
    arg = num / den
    arg = min(max(arg, 0.0), 1.0)
    return (2.0 / math.pi) * math.acos(math.sqrt(arg))


@njit(cache=True)
def _neg_batch_dd(z_batch, binom, rho_d, want_err, out_neg, out_err, out_ok):
    """Negativity of the CSS weights for a batch of z-node sets (extended).

    With want_err, one step of iterative refinement estimates the forward
    error of each solve (standard cond * eps magnitude); a large estimate
    flags the negativity as numerically meaningless at this precision.
    """
    b, npts = z_batch.shape
    m_hi = np.empty((npts, npts))
    m_lo = np.empty((npts, npts))
    a_hi = np.empty((npts, npts))
    a_lo = np.empty((npts, npts))
    xh = np.empty(npts)
    xl = np.empty(npts)
    dh = np.empty(npts)
    dl = np.empty(npts)
    rh = np.empty(npts)
    rl = np.empty(npts)
    for i in range(b):
        _mapping_dd(z_batch[i], binom, m_hi, m_lo)
        if want_err:
            a_hi[:, :] = m_hi
            a_lo[:, :] = m_lo
        bh = rho_d.copy()
        blc = np.zeros(npts)
        bad = dd._lu_solve_inplace(m_hi, m_lo, bh, blc, xh, xl)
        if bad >= 0:
            out_neg[i] = np.inf
            out_err[i] = np.inf
            out_ok[i] = False
            continue
        s_h, s_l = 0.0, 0.0
        for a in range(npts):
            v = xh[a] + xl[a]
            if v < 0.0:
                s_h, s_l = _add(s_h, s_l, -xh[a], -xl[a])
        out_neg[i] = s_h + s_l
        out_ok[i] = True
        if want_err:
            for d_row in range(npts):
                sh, sl = rho_d[d_row], 0.0
                for a in range(npts):
                    ph, pl = _mul(a_hi[d_row, a], a_lo[d_row, a], xh[a], xl[a])
                    sh, sl = _add(sh, sl, -ph, -pl)
                rh[d_row] = sh
                rl[d_row] = sl
            _mapping_dd(z_batch[i], binom, a_hi, a_lo)
            bad2 = dd._lu_solve_inplace(a_hi, a_lo, rh, rl, dh, dl)
            if bad2 >= 0:
                out_err[i] = np.inf
            else:
                emax = 0.0
                for a in range(npts):
                    ea = abs(dh[a] + dl[a])
                    if ea > emax:
                        emax = ea
                out_err[i] = emax
        else:
            out_err[i] = 0.0


def _negativity_batch(n: int, etas: np.ndarray, rho_d: np.ndarray,
                      precision: str, want_err: bool = False,
                      ) -> tuple[np.ndarray, np.ndarray, int]:
    """Negativities over a batch of eta values.

    Returns (values, error estimates, failure count); error estimates are
    zero unless want_err is set.
    """
    etas = np.asarray(etas, dtype=float)
    binom = _binomials(n)
    a = np.arange(n + 1, dtype=float)
    z = np.cos(etas[:, None] * a[None, :] * np.pi / (2.0 * n)) ** 2
    if precision == "extended":
        neg = np.empty(len(etas))
        err = np.empty(len(etas))
        ok = np.empty(len(etas), dtype=np.bool_)
        _neg_batch_dd(z, binom, rho_d, want_err, neg, err, ok)
        return neg, err, int((~ok).sum())
    d_idx = np.arange(n + 1)
    m = (binom[None, :, None] * z[:, None, :] ** (n - d_idx)[None, :, None]
         * (1.0 - z)[:, None, :] ** d_idx[None, :, None])
    neg = np.full(len(etas), np.inf)
    err = np.zeros(len(etas))
    fails = 0
    for i in range(len(etas)):
        try:
            p = np.linalg.solve(m[i], rho_d)
        except np.linalg.LinAlgError:
            fails += 1
            err[i] = np.inf
            continue
        neg[i] = -np.minimum(p, 0.0).sum()
        if want_err:
            r = rho_d - m[i] @ p
            try:
                err[i] = float(np.abs(np.linalg.solve(m[i], r)).max())
            except np.linalg.LinAlgError:
                err[i] = np.inf
    return neg, err, fails


def scan_landscape(n: int, t_grid, eta_grid, precision: str | None = None,
                   gamma: float = 1.0) -> NegativityField:
    """Clamped log10 negativity over a (t, eta) grid."""
    from .dicke import ModelParams, evolve_exact

    t_grid = np.asarray(t_grid, dtype=float)
    eta_grid = np.asarray(eta_grid, dtype=float)
    if t_grid.size == 0 or eta_grid.size == 0:
        raise ValueError("grids must be nonempty")
    if np.any(np.diff(t_grid) < 0) or np.any(np.diff(eta_grid) < 0):
        raise ValueError("grids must be sorted")
    if precision is None:
        precision = default_precision(n)
    pops = evolve_exact(ModelParams(n_emitters=n, gamma=gamma), t_grid)
    values = np.empty((len(t_grid), len(eta_grid)))
    warnings = 0
    for i, p in enumerate(pops):
        rho_d = _truncate_rho(p.probs[::-1], precision)
        neg, _err, fails = _negativity_batch(n, eta_grid, rho_d, precision)
        warnings += fails
        with np.errstate(divide="ignore"):
            row = np.log10(np.maximum(neg, 0.0))
        row[~np.isfinite(row)] = -10.0  # exact zeros and failed solves clamp low/high
        row[neg == np.inf] = 0.0
        values[i] = np.clip(row, -10.0, 0.0)
    return NegativityField(t_grid=t_grid, eta_grid=eta_grid, values=values,
                           warnings=warnings)


def _golden_min(f, lo: float, hi: float, tol: float = 1e-12) -> tuple[float, float]:
    """Golden-section minimum of f on [lo, hi] to window width tol."""
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _bisect_edge(f, eta_out: float, eta_in: float, tol: float,
                 width: float = 1e-12) -> float:
    """Locate the boundary of {negativity < tol} between an outside and an
    inside point; returns an inside eta within `width` of the edge."""
    while abs(eta_in - eta_out) > width:
        mid = 0.5 * (eta_in + eta_out)
        if f(mid) < tol:
            eta_in = mid
        else:
            eta_out = mid
    return eta_in


_MP_DPS_LADDER = (60, 100, 160, 240)


def _solve_mp(n: int, eta: float, rho_d: np.ndarray,
              dps: int) -> tuple[np.ndarray, float, float]:
    """Arbitrary-precision solve of the mapping system at `dps` digits.

    Returns (weights, negativity, forward-error estimate from one step of
    iterative refinement).  Used where the condition number exceeds what
    compensated double-double arithmetic can certify.
    """
    from mpmath import lu_solve, matrix, mp, mpf

    with mp.workdps(dps):
        ang = [mpf(eta) * a * mp.pi / n for a in range(n + 1)]
        z = [mp.cos(x / 2) ** 2 for x in ang]
        m = matrix(n + 1, n + 1)
        for d in range(n + 1):
            c = mpf(math.comb(n, d))
            for j in range(n + 1):
                m[d, j] = c * z[j] ** (n - d) * (1 - z[j]) ** d
        b = matrix([mpf(float(x)) for x in rho_d])
        try:
            x = lu_solve(m, b)
        except ZeroDivisionError:
            # numerically singular at this dps; caller escalates
            return np.zeros(n + 1), math.inf, math.inf
        r = b - m * x
        corr = lu_solve(m, r)
        err = max(abs(v) for v in corr)
        neg = -sum(min(v, mpf(0)) for v in x)
        weights = np.array([float(v) for v in x])
        return weights, float(neg), float(err)


def _neg_mp(n: int, eta: float, rho_d: np.ndarray,
            tol: float) -> tuple[float, float, int]:
    """Adaptive-precision negativity; escalates dps until the refinement
    error estimate is far below both tol and the value itself."""
    for dps in _MP_DPS_LADDER:
        _, neg, err = _solve_mp(n, eta, rho_d, dps)
        if err < max(1e-3 * neg, 1e-3 * tol * 1e-3, 1e-13):
            return neg, err, dps
    return neg, err, _MP_DPS_LADDER[-1]


def _local_minima(vals: np.ndarray) -> np.ndarray:
    """Indices of strict-or-flat interior local minima, plus the endpoints
    when the curve slopes into them."""
    idx = []
    k = len(vals)
    for j in range(k):
        left = vals[j - 1] if j > 0 else np.inf
        right = vals[j + 1] if j < k - 1 else np.inf
        if vals[j] <= left and vals[j] <= right and np.isfinite(vals[j]):
            idx.append(j)
    return np.asarray(idx, dtype=int)


def _refine_dip(neg_at, grid, vals, j, tol) -> tuple[float, float]:
    """Golden refinement of the dip around grid index j."""
    b_lo = grid[max(j - 1, 0)]
    b_hi = grid[min(j + 1, len(grid) - 1)]
    if b_hi <= b_lo:
        return grid[j], vals[j]
    return _golden_min(neg_at, b_lo, b_hi)


def _edge_refine(neg_at, eta_out: float, eta_star: float, neg_star: float,
                 tol: float) -> float:
    """Tie-break toward the passage edge between an outside point and the
    refined dip.  The bisection target sits just above the dip's floor but
    safely below tol, so the accepted eta does not hug the tol contour."""
    target = min(max(1e-12, 2.0 * neg_star, 1e-6 * tol), 0.5 * tol)
    if neg_star >= target:
        return eta_star
    return _bisect_edge(neg_at, eta_out, eta_star, target)


def _search_window(n, rho_d, lo, hi, npts, tol, branch, precision,
                   at_floor, at_cap):
    """One windowed search: coarse scan, refinement of every candidate dip,
    edge tie-break.  Returns (eta, negativity), "widen" when the passage
    extends past the searched window, or None when nothing qualifies."""
    grid = np.linspace(lo, hi, npts)
    vals, errs, _ = _negativity_batch(n, grid, rho_d, precision, want_err=True)
    valid = np.isfinite(vals) & (errs < 0.01 * tol)
    use = np.where(valid, vals, np.inf)

    def neg_at(eta):
        v, _, _ = _negativity_batch(n, np.array([eta]), rho_d, precision)
        return v[0]

    inside = np.flatnonzero(use < tol)
    if inside.size:
        brk = np.flatnonzero(np.diff(inside) > 1)
        starts = np.r_[inside[0], inside[brk + 1]]
        ends = np.r_[inside[brk], inside[-1]]
        if branch == "lower":
            s, e = int(starts[0]), int(ends[0])
            if s == 0 and not at_floor:
                return "widen"
            jm = s + int(np.argmin(use[s:e + 1]))
            eta_star, neg_star = _refine_dip(neg_at, grid, use, jm, tol)
            out = grid[s - 1] if s > 0 else lo
            return _edge_refine(neg_at, out, eta_star, neg_star, tol), neg_star
        s, e = int(starts[-1]), int(ends[-1])
        if e == npts - 1 and not at_cap:
            return "widen"
        jm = s + int(np.argmin(use[s:e + 1]))
        eta_star, neg_star = _refine_dip(neg_at, grid, use, jm, tol)
        out = grid[e + 1] if e < npts - 1 else hi
        return _edge_refine(neg_at, out, eta_star, neg_star, tol), neg_star

    # no grid point below tol: dips may be narrower than the grid spacing
    mins = _local_minima(use)
    if not mins.size:
        return None
    hits = []
    for j in mins[np.argsort(use[mins])][:8]:
        eta_star, neg_star = _refine_dip(neg_at, grid, use, int(j), tol)
        if neg_star < tol:
            hits.append((eta_star, neg_star, int(j)))
    if not hits:
        return None
    if branch == "lower":
        eta_star, neg_star, j = min(hits)
        out = grid[j - 1] if j > 0 else lo
    else:
        eta_star, neg_star, j = max(hits)
        out = grid[j + 1] if j < npts - 1 else hi
    return _edge_refine(neg_at, out, eta_star, neg_star, tol), neg_star


def _search_window_mp(n, rho_d, lo, hi, npts, tol,
                      branch) -> tuple[float, float, int] | None:
    """Escalated search where double-double certification fails: a sparse
    arbitrary-precision scan plus edge bisection.  Returns (eta, negativity,
    dps) of the accepted point."""
    grid = np.linspace(lo, hi, npts)
    vals = np.array([_neg_mp(n, e, rho_d, tol)[0] for e in grid])
    inside = np.flatnonzero(vals < tol)
    if not inside.size:
        return None
    j = int(inside[0] if branch == "lower" else inside[-1])

    def neg_at(e):
        return _neg_mp(n, e, rho_d, tol)[0]

    step = (hi - lo) / (npts - 1)
    out = grid[j - 1] if branch == "lower" else grid[j + 1] if j < npts - 1 else hi
    if branch == "lower" and j == 0:
        out = lo
    target = min(max(1e-12, 2.0 * vals[j], 1e-6 * tol), 0.5 * tol)
    if vals[j] >= target or out == grid[j]:
        eta = float(grid[j])
    else:
        eta = float(_bisect_edge(neg_at, out, grid[j], target,
                                 width=max(step * 1e-3, 1e-6)))
    neg, _err, dps = _neg_mp(n, eta, rho_d, tol)
    return eta, float(neg), dps


def trace_passage(n: int, t_grid, branch: str = "lower", tol: float = 1e-6,
                  precision: str | None = None, gamma: float = 1.0,
                  window: float = 0.05, coarse: int = 0,
                  eta_max: float = 1.5,
                  ) -> tuple[EtaCurve, list[CssDecomposition]]:
    """Continuation in t of a positive passage, minimizing negativity over eta.

    The lower branch is constrained to eta <= 1 and tie-breaks toward the
    smallest eta within the found passage; the upper branch is unconstrained
    up to eta_max and tie-breaks toward the largest.  Where the extended
    backend cannot certify a solve (small t, steep conditioning) the search
    escalates to adaptive arbitrary precision.  Times where the tolerance
    cannot be met anywhere are reported in the curve's `gaps`, not raised.
    """
    from .dicke import ModelParams, evolve_exact

    if branch not in ("lower", "upper"):
        raise ValueError(f"unknown branch {branch!r}")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    t_grid = np.asarray(t_grid, dtype=float)
    if precision is None:
        precision = default_precision(n)
    if coarse <= 0:
        # passages narrow to ~1e-5 in eta at late times for large N
        coarse = 1500 if precision == "extended" else 400
    pops = evolve_exact(ModelParams(n_emitters=n, gamma=gamma), t_grid)

    t_seed = next((t for t in t_grid if t > 0), 1.0 / gamma)
    prev_eta = eta_analytic_n2(t_seed, gamma)
    if branch == "upper":
        prev_eta = min(1.2 * prev_eta + 0.05, eta_max)
    cap = 1.0 if branch == "lower" else eta_max
    eta_floor = 1e-3

    etas = np.empty(len(t_grid))
    negs = np.empty(len(t_grid))
    gaps = []
    decomps = []
    for i, p in enumerate(pops):
        rho_d = _truncate_rho(p.probs[::-1], precision)
        # escalated solves resolve structure below the double-double
        # truncation level, so they get the untruncated populations
        rho_raw = np.asarray(p.probs, dtype=float)[::-1].copy()
        if rho_d[0] != 0.0 and not rho_d[1:].any():
            # fully inverted state: exactly the a=0 ring at any eta
            weights = np.zeros(n + 1)
            weights[0] = rho_d[0]
            decomps.append(CssDecomposition(
                weights=weights, eta=prev_eta, time=p.time, negativity=0.0,
                residual=0.0, precision=precision))
            etas[i] = prev_eta
            negs[i] = 0.0
            continue
        accepted = None
        for widen in (window, 2 * window, 4 * window):
            lo = max(prev_eta - widen, eta_floor)
            hi = min(prev_eta + widen, cap)
            res = _search_window(n, rho_d, lo, hi, coarse, tol, branch,
                                 precision, at_floor=lo <= eta_floor,
                                 at_cap=hi >= cap)
            if res == "widen":
                continue
            if res is not None:
                accepted = (res[0], res[1], "native")
                break
        if accepted is None:
            # full-range rescue: the passage may have jumped
            res = _search_window(n, rho_d, eta_floor, cap, 4 * coarse, tol,
                                 branch, precision, at_floor=True, at_cap=True)
            if res is not None and res != "widen":
                accepted = (res[0], res[1], "native")
        if accepted is None and precision == "extended":
            for widen in (window, 2 * window, 4 * window):
                lo = max(prev_eta - widen, eta_floor)
                hi = min(prev_eta + widen, cap)
                res = _search_window_mp(n, rho_raw, lo, hi, 13, tol, branch)
                if res is not None:
                    accepted = (res[0], res[1], "mp", res[2])
                    break
        if accepted is None:
            # best effort: report the reachable minimum and log a gap
            grid = np.linspace(max(prev_eta - 4 * window, eta_floor),
                               min(prev_eta + 4 * window, cap), coarse)
            vals, _, _ = _negativity_batch(n, grid, rho_d, precision)
            j = int(np.argmin(vals))
            accepted = (float(grid[j]), float(vals[j]), "native")
            gaps.append(float(p.time))
        eta_acc, neg_acc, source = accepted[0], accepted[1], accepted[2]
        if source == "mp":
            weights, neg_mp, err_mp = _solve_mp(n, eta_acc, rho_raw,
                                                accepted[3])
            d = CssDecomposition(weights=weights, eta=eta_acc, time=p.time,
                                 negativity=neg_mp, residual=err_mp,
                                 precision=precision)
        else:
            d = solve_css(p, eta_acc, precision)
        decomps.append(d)
        etas[i] = eta_acc
        negs[i] = d.negativity
        prev_eta = eta_acc
    curve = EtaCurve(t_grid=t_grid, eta=etas, negativity=negs, branch=branch,
                     gaps=tuple(gaps))
    return curve, decomps
