"""Compiled kernels for quantum-trajectory ensembles.

Trajectory stepping lives in one njit loop per trajectory batch.  The
per-step entanglement cost of the phi-optimized strategy needs eigenvalues
of many small Hermitian Gram matrices; a hand-rolled cyclic Jacobi beats
LAPACK-call overhead at these sizes, and the phi dependence of the candidate
Grams is linear in exp(+-2i phi), so the three building blocks are computed
once per step and every phi evaluation costs only O(k^2) plus the Jacobi.
"""

import math

import numpy as np
from numba import njit

_EIG_FLOOR = 1e-15
_PHI_TOL = 1e-8
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

STRATEGY_NAIVE = 0
STRATEGY_PHI_RANDOM = 1
STRATEGY_PHI_OPT = 2


@njit(cache=True)
def _jacobi_entropy_bits(g, tol):
    """Entropy -sum lam log2 lam of a Hermitian PSD matrix with unit trace
    up to normalization; destroys g.  Off-diagonals are driven below
    tol * trace; eigenvalue errors are second order in the remainder."""
    k = g.shape[0]
    scale = 0.0
    for i in range(k):
        scale += abs(g[i, i].real)
    if scale == 0.0:
        return 0.0
    inv_scale = 1.0 / scale
    thresh2 = (tol * scale) ** 2
    skip2 = 1e-6 * thresh2
    for _sweep in range(40):
        off2 = 0.0
        for p in range(k - 1):
            for q in range(p + 1, k):
                x = g[p, q]
                off2 += x.real * x.real + x.imag * x.imag
        if off2 < thresh2:
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = g[p, q]
                a2 = apq.real * apq.real + apq.imag * apq.imag
                if a2 <= skip2:
                    continue
                a = math.sqrt(a2)
                u = apq / a
                alpha = g[p, p].real
                beta = g[q, q].real
                tau = (beta - alpha) / (2.0 * a)
                if tau >= 0.0:
                    t = tau - math.sqrt(tau * tau + 1.0)
                else:
                    t = tau + math.sqrt(tau * tau + 1.0)
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                for i in range(k):
                    if i == p or i == q:
                        continue
                    aip = g[i, p]
                    aiq = g[i, q]
                    g[i, p] = aip * c + aiq * s * np.conj(u)
                    g[i, q] = -aip * s * u + aiq * c
                    g[p, i] = np.conj(g[i, p])
                    g[q, i] = np.conj(g[i, q])
                g[p, p] = c * c * alpha + 2.0 * c * s * a + s * s * beta
                g[q, q] = s * s * alpha - 2.0 * c * s * a + c * c * beta
                g[p, q] = 0.0
                g[q, p] = 0.0
    ent = 0.0
    for i in range(k):
        lam = g[i, i].real * inv_scale
        if lam > _EIG_FLOOR:
            ent -= lam * math.log2(lam)
    return ent


@njit(cache=True)
def _fill_psi(c, table, nb, na, psi):
    """Amplitude matrix of (unnormalized) symmetric amplitudes c."""
    for l in range(nb + 1):
        for j in range(na + 1):
            psi[l, j] = c[l + j] * table[l, l + j]


@njit(cache=True)
def _gram(pa, pb, out):
    """out = pa @ pb^dagger for (k x j) amplitude matrices."""
    k, j = pa.shape
    for p in range(k):
        for q in range(k):
            acc = 0.0 + 0.0j
            for r in range(j):
                acc += pa[p, r] * np.conj(pb[q, r])
            out[p, q] = acc


@njit(cache=True)
def _entropy_state(c, table, nb, na, tol=1e-14):
    """Half-block entropy (bits) of unnormalized symmetric amplitudes c."""
    psi = np.empty((nb + 1, na + 1), dtype=np.complex128)
    _fill_psi(c, table, nb, na, psi)
    g = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    _gram(psi, psi, g)
    return _jacobi_entropy_bits(g, tol)


@njit(cache=True)
def _spo_from_grams(guu, gvv, guv, cf2, sf2, csf, phi_f, g0, g1, tol):
    """Expected post-operation entropy at mixing angle phi_f.

    Branch Grams are cf2*guu + sf2*gvv +- csf*(e^{2i phi} guv + h.c.)
    (global phases drop out); their traces are the branch probabilities.
    """
    k = guu.shape[0]
    e2 = complex(math.cos(2.0 * phi_f), math.sin(2.0 * phi_f))
    p0 = 0.0
    p1 = 0.0
    for p in range(k):
        for q in range(p, k):
            cross = e2 * guv[p, q] + np.conj(e2) * np.conj(guv[q, p])
            a = cf2 * guu[p, q] + sf2 * gvv[p, q] + csf * cross
            b = sf2 * guu[p, q] + cf2 * gvv[p, q] - csf * cross
            g0[p, q] = a
            g1[p, q] = b
            if q > p:
                g0[q, p] = np.conj(a)
                g1[q, p] = np.conj(b)
        p0 += g0[p, p].real
        p1 += g1[p, p].real
    s = p0 + p1
    if s <= 0.0:
        return 0.0
    cost = 0.0
    if p0 > 1e-30:
        cost += p0 * _jacobi_entropy_bits(g0, tol)
    if p1 > 1e-30:
        cost += p1 * _jacobi_entropy_bits(g1, tol)
    return cost / s


@njit(cache=True)
def _optimize_phi_grams(guu, gvv, guv, theta_f, grid, g0, g1, tol):
    """Coarse grid over [0, pi) then golden-section refinement to 1e-8."""
    cf = math.cos(theta_f)
    sf = math.sin(theta_f)
    cf2 = cf * cf
    sf2 = sf * sf
    csf = cf * sf
    best_phi = 0.0
    best = 1e300
    step = math.pi / grid
    for i in range(grid):
        phi = i * step
        val = _spo_from_grams(guu, gvv, guv, cf2, sf2, csf, phi, g0, g1, tol)
        if val < best:
            best = val
            best_phi = phi
    lo = best_phi - step
    hi = best_phi + step
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = _spo_from_grams(guu, gvv, guv, cf2, sf2, csf, x1, g0, g1, tol)
    f2 = _spo_from_grams(guu, gvv, guv, cf2, sf2, csf, x2, g0, g1, tol)
    # Stop once the bracket values are indistinguishable at the accuracy of
    # the eigensolve; past that point further shrinking compares noise.
    noise = 1e-13 + 1e-9 * best
    while hi - lo > _PHI_TOL and abs(f1 - f2) > noise:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = _spo_from_grams(guu, gvv, guv, cf2, sf2, csf, x1, g0, g1, tol)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = _spo_from_grams(guu, gvv, guv, cf2, sf2, csf, x2, g0, g1, tol)
    if f1 <= f2:
        return x1, f1
    return x2, f2


@njit(cache=True)
def _optimize_phi(u_amp, v_amp, theta_f, table, nb, na, grid, tol=1e-9):
    """Standalone entry: build the Gram blocks, then search phi."""
    psi_u = np.empty((nb + 1, na + 1), dtype=np.complex128)
    psi_v = np.empty((nb + 1, na + 1), dtype=np.complex128)
    _fill_psi(u_amp, table, nb, na, psi_u)
    _fill_psi(v_amp, table, nb, na, psi_v)
    guu = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    gvv = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    guv = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    _gram(psi_u, psi_u, guu)
    _gram(psi_v, psi_v, gvv)
    _gram(psi_u, psi_v, guv)
    g0 = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    g1 = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    return _optimize_phi_grams(guu, gvv, guv, theta_f, grid, g0, g1, tol)


@njit(cache=True)
def _mix(u_amp, v_amp, theta_f, phi_f, w0, w1):
    """Remixed branches F_0 psi, F_1 psi from E_0 psi, E_1 psi."""
    cf = math.cos(theta_f)
    sf = math.sin(theta_f)
    ep = complex(math.cos(phi_f), math.sin(phi_f))
    em = np.conj(ep)
    for m in range(u_amp.shape[0]):
        a = ep * u_amp[m]
        b = em * v_amp[m]
        w0[m] = cf * a + sf * b
        w1[m] = -sf * a + cf * b


@njit(cache=True)
def _norm_sq(c):
    s = 0.0
    for m in range(c.shape[0]):
        s += c[m].real * c[m].real + c[m].imag * c[m].imag
    return s


@njit(cache=True)
def _bloch_length(c, n):
    sz = 0.0
    for m in range(n + 1):
        pm = c[m].real * c[m].real + c[m].imag * c[m].imag
        sz += (m - n / 2.0) * pm
    sminus = 0.0 + 0.0j
    for m in range(1, n + 1):
        sminus += np.conj(c[m - 1]) * c[m] * math.sqrt(m * (n - m + 1.0))
    return (2.0 / n) * math.sqrt(sz * sz + abs(sminus) ** 2)


@njit(cache=True)
def run_batch(n, nb, e0diag, e1amp, table, strategy, theta_f, draws,
              record_stride, grid,
              xi_rec, ent_rec, mexc_rec, pops_rec, jumps, fail_step):
    """Evolve a batch of trajectories; diagnostics land in the *_rec arrays.

    draws has shape (n_traj, n_steps, 2): per step the jump draw, then the
    phi draw (consumed by phi_random only).  fail_step[chi] records the step
    of a numerical breakdown, or -1.
    """
    n_traj, n_steps, _ = draws.shape
    na = n - nb
    u_amp = np.empty(n + 1, dtype=np.complex128)
    v_amp = np.empty(n + 1, dtype=np.complex128)
    w0 = np.empty(n + 1, dtype=np.complex128)
    w1 = np.empty(n + 1, dtype=np.complex128)
    psi_u = np.empty((nb + 1, na + 1), dtype=np.complex128)
    psi_v = np.empty((nb + 1, na + 1), dtype=np.complex128)
    guu = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    gvv = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    guv = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    g0 = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    g1 = np.empty((nb + 1, nb + 1), dtype=np.complex128)
    for chi in range(n_traj):
        c = np.zeros(n + 1, dtype=np.complex128)
        c[n] = 1.0
        jumps[chi] = 0
        fail_step[chi] = -1
        for tau in range(n_steps + 1):
            if tau % record_stride == 0:
                r = tau // record_stride
                xi_rec[chi, r] = _bloch_length(c, n)
                ent_rec[chi, r] = _entropy_state(c, table, nb, na)
                me = 0.0
                for m in range(n + 1):
                    pm = c[m].real * c[m].real + c[m].imag * c[m].imag
                    pops_rec[chi, r, m] = pm
                    me += m * pm
                mexc_rec[chi, r] = me
            if tau == n_steps:
                break
            for m in range(n + 1):
                u_amp[m] = e0diag[m] * c[m]
            for m in range(n):
                v_amp[m] = e1amp[m + 1] * c[m + 1]
            v_amp[n] = 0.0
            if strategy == STRATEGY_NAIVE:
                for m in range(n + 1):
                    w0[m] = u_amp[m]
                    w1[m] = v_amp[m]
            else:
                if strategy == STRATEGY_PHI_RANDOM:
                    phi_f = 2.0 * math.pi * draws[chi, tau, 1]
                else:
                    _fill_psi(u_amp, table, nb, na, psi_u)
                    _fill_psi(v_amp, table, nb, na, psi_v)
                    _gram(psi_u, psi_u, guu)
                    _gram(psi_v, psi_v, gvv)
                    _gram(psi_u, psi_v, guv)
                    phi_f, _cost = _optimize_phi_grams(
                        guu, gvv, guv, theta_f, grid, g0, g1, 3e-8)
                _mix(u_amp, v_amp, theta_f, phi_f, w0, w1)
            p0 = _norm_sq(w0)
            p1 = _norm_sq(w1)
            s = p0 + p1
            if p0 < 1e-30 and p1 < 1e-30:
                fail_step[chi] = tau
                break
            if draws[chi, tau, 0] < p0 / s:
                inv = 1.0 / math.sqrt(p0)
                for m in range(n + 1):
                    c[m] = w0[m] * inv
            else:
                inv = 1.0 / math.sqrt(p1)
                for m in range(n + 1):
                    c[m] = w1[m] * inv
                jumps[chi] += 1
