"""Compensated double-double arithmetic and linear solves.

A double-double number is an unevaluated sum hi + lo of two float64 with
|lo| <= ulp(hi)/2, giving roughly 32 significant decimal digits.  Arrays are
carried as separate hi/lo float64 ndarrays.  The error-free transformations
(two_sum, two_prod with Dekker splitting) require strict IEEE semantics, so
none of the kernels here use fastmath.
"""

import numpy as np
from numba import njit

__all__ = [
    "dd_array",
    "to_float",
    "lu_solve",
    "residual_max",
    "DD_EPS",
]

# Relative rounding unit of a double-double, ~4.9e-32.
DD_EPS = 2.0 ** -106

_SPLITTER = 134217729.0  # 2**27 + 1


@njit(cache=True)
def _two_sum(a, b):
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


@njit(cache=True)
def _quick_two_sum(a, b):
    # requires |a| >= |b|
    s = a + b
    err = b - (s - a)
    return s, err


@njit(cache=True)
def _two_prod(a, b):
    p = a * b
    ca = _SPLITTER * a
    ahi = ca - (ca - a)
    alo = a - ahi
    cb = _SPLITTER * b
    bhi = cb - (cb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


@njit(cache=True)
def _add(ah, al, bh, bl):
    s1, s2 = _two_sum(ah, bh)
    t1, t2 = _two_sum(al, bl)
    s2 += t1
    s1, s2 = _quick_two_sum(s1, s2)
    s2 += t2
    return _quick_two_sum(s1, s2)


@njit(cache=True)
def _mul(ah, al, bh, bl):
    p1, p2 = _two_prod(ah, bh)
    p2 += ah * bl + al * bh
    return _quick_two_sum(p1, p2)


@njit(cache=True)
def _div(ah, al, bh, bl):
    q1 = ah / bh
    th, tl = _mul(bh, bl, q1, 0.0)
    rh, rl = _add(ah, al, -th, -tl)
    q2 = rh / bh
    th, tl = _mul(bh, bl, q2, 0.0)
    rh, rl = _add(rh, rl, -th, -tl)
    q3 = rh / bh
    s1, s2 = _quick_two_sum(q1, q2)
    return _add(s1, s2, q3, 0.0)


def dd_array(values) -> tuple[np.ndarray, np.ndarray]:
    """Promote a float64 array to a (hi, lo) double-double pair."""
    hi = np.asarray(values, dtype=np.float64).copy()
    return hi, np.zeros_like(hi)


def to_float(hi: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """Round a double-double array back to float64."""
    return hi + lo


@njit(cache=True)
def _lu_solve_inplace(ah, al, bh, bl, xh, xl):
    """Solve A x = b by LU with partial pivoting; A and b are destroyed.

    Returns the index of a zero pivot, or -1 on success.
    """
    n = ah.shape[0]
    for k in range(n):
        # pivot on the hi component; lo only matters when hi ties at zero
        piv = k
        best = abs(ah[k, k])
        for i in range(k + 1, n):
            v = abs(ah[i, k])
            if v > best:
                best = v
                piv = i
        if ah[piv, k] == 0.0 and al[piv, k] == 0.0:
            return k
        if piv != k:
            for j in range(n):
                ah[k, j], ah[piv, j] = ah[piv, j], ah[k, j]
                al[k, j], al[piv, j] = al[piv, j], al[k, j]
            bh[k], bh[piv] = bh[piv], bh[k]
            bl[k], bl[piv] = bl[piv], bl[k]
        for i in range(k + 1, n):
            mh, ml = _div(ah[i, k], al[i, k], ah[k, k], al[k, k])
            ah[i, k] = 0.0
            al[i, k] = 0.0
            for j in range(k + 1, n):
                ph, pl = _mul(mh, ml, ah[k, j], al[k, j])
                ah[i, j], al[i, j] = _add(ah[i, j], al[i, j], -ph, -pl)
            ph, pl = _mul(mh, ml, bh[k], bl[k])
            bh[i], bl[i] = _add(bh[i], bl[i], -ph, -pl)
    for i in range(n - 1, -1, -1):
        sh, sl = bh[i], bl[i]
        for j in range(i + 1, n):
            ph, pl = _mul(ah[i, j], al[i, j], xh[j], xl[j])
            sh, sl = _add(sh, sl, -ph, -pl)
        xh[i], xl[i] = _div(sh, sl, ah[i, i], al[i, i])
    return -1


def lu_solve(a_hi, a_lo, b_hi, b_lo):
    """Solve A x = b in double-double precision.

    Raises np.linalg.LinAlgError on an exactly singular pivot.
    """
    ah = np.array(a_hi, dtype=np.float64)
    al = np.array(a_lo, dtype=np.float64)
    bh = np.array(b_hi, dtype=np.float64)
    bl = np.array(b_lo, dtype=np.float64)
    xh = np.empty_like(bh)
    xl = np.empty_like(bl)
    bad = _lu_solve_inplace(ah, al, bh, bl, xh, xl)
    if bad >= 0:
        raise np.linalg.LinAlgError(f"singular pivot at column {bad}")
    return xh, xl


@njit(cache=True)
def _residual_max(ah, al, xh, xl, bh, bl):
    n = ah.shape[0]
    worst = 0.0
    for i in range(n):
        sh, sl = -bh[i], -bl[i]
        for j in range(n):
            ph, pl = _mul(ah[i, j], al[i, j], xh[j], xl[j])
            sh, sl = _add(sh, sl, ph, pl)
        r = abs(sh + sl)
        if r > worst:
            worst = r
    return worst


def residual_max(a_hi, a_lo, x_hi, x_lo, b_hi, b_lo) -> float:
    """max-norm of A x - b, accumulated in double-double."""
    return float(_residual_max(a_hi, a_lo, x_hi, x_lo, b_hi, b_lo))
