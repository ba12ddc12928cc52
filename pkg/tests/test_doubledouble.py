"""Unit tests for the compensated double-double arithmetic backend.

mpmath at 50 digits serves as the oracle for the scalar kernels; the
property-based cases draw operands across many magnitudes to exercise the
error-free transformations.
"""

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dicke_css import doubledouble as dd

FLOATS = st.floats(min_value=-1e12, max_value=1e12,
                   allow_nan=False, allow_infinity=False).filter(
                       lambda x: x == 0.0 or abs(x) > 1e-10)
SMALL = st.floats(min_value=-1.0, max_value=1.0,
                  allow_nan=False, allow_infinity=False)


def _mp(h, l):
    with mpmath.workdps(50):
        return mpmath.mpf(h) + mpmath.mpf(l)


def _dd_err(h, l, exact):
    with mpmath.workdps(50):
        diff = abs(_mp(h, l) - exact)
        scale = max(abs(exact), mpmath.mpf(1e-300))
        return float(diff / scale)


@settings(max_examples=200, deadline=None)
@given(FLOATS, SMALL, FLOATS, SMALL)
def test_add_matches_mpmath(ah, al, bh, bl):
    al, bl = al * 1e-17 * abs(ah), bl * 1e-17 * abs(bh)
    h, l = dd._add(ah, al, bh, bl)
    with mpmath.workdps(50):
        exact = _mp(ah, al) + _mp(bh, bl)
        # cancellation can only leave what the inputs themselves carried
        inmag = max(abs(_mp(ah, al)), abs(_mp(bh, bl)), mpmath.mpf(1e-300))
        assert abs(_mp(h, l) - exact) <= float(inmag) * 1e-31


@settings(max_examples=200, deadline=None)
@given(FLOATS, SMALL, FLOATS, SMALL)
def test_mul_matches_mpmath(ah, al, bh, bl):
    al, bl = al * 1e-17 * abs(ah), bl * 1e-17 * abs(bh)
    h, l = dd._mul(ah, al, bh, bl)
    with mpmath.workdps(50):
        exact = _mp(ah, al) * _mp(bh, bl)
    assert _dd_err(h, l, exact) < 1e-30


@settings(max_examples=200, deadline=None)
@given(FLOATS, SMALL, FLOATS.filter(lambda x: abs(x) > 1e-6), SMALL)
def test_div_matches_mpmath(ah, al, bh, bl):
    al, bl = al * 1e-17 * abs(ah), bl * 1e-17 * abs(bh)
    h, l = dd._div(ah, al, bh, bl)
    with mpmath.workdps(50):
        exact = _mp(ah, al) / _mp(bh, bl)
    assert _dd_err(h, l, exact) < 1e-30


def test_two_sum_exact():
    s, e = dd._two_sum(1.0, 1e-20)
    assert s == 1.0 and e == 1e-20


def test_two_prod_exact():
    # (1 + 2^-30)^2 = 1 + 2^-29 + 2^-60; the tail lands in the error term
    a = 1.0 + 2.0 ** -30
    p, e = dd._two_prod(a, a)
    assert p + e == pytest.approx(a * a)
    assert e != 0.0


def test_dd_array_round_trip():
    x = np.array([1.0, -2.5, 3e-8])
    hi, lo = dd.dd_array(x)
    assert (dd.to_float(hi, lo) == x).all()
    assert (lo == 0.0).all()


class TestLuSolve:
    def test_well_conditioned_vs_mpmath(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((6, 6)) + 6 * np.eye(6)
        b = rng.standard_normal(6)
        xh, xl = dd.lu_solve(a, np.zeros_like(a), b, np.zeros_like(b))
        with mpmath.workdps(50):
            am = mpmath.matrix([[mpmath.mpf(v) for v in row] for row in a])
            bm = mpmath.matrix([mpmath.mpf(v) for v in b])
            xm = mpmath.lu_solve(am, bm)
            for i in range(6):
                assert abs(_mp(xh[i], xl[i]) - xm[i]) < 1e-28

    def test_residual_at_dd_level(self):
        rng = np.random.default_rng(8)
        a = rng.standard_normal((8, 8)) + 8 * np.eye(8)
        b = rng.standard_normal(8)
        az = np.zeros_like(a)
        bz = np.zeros_like(b)
        xh, xl = dd.lu_solve(a, az, b, bz)
        assert dd.residual_max(a, az, xh, xl, b, bz) < 1e-28

    def test_beats_double_precision_on_hilbert(self):
        # cond(H_10) ~ 1e13: the right-hand side must itself be carried to
        # double-double accuracy or its rounding dominates the forward error
        n = 10
        h = np.array([[1.0 / (i + j + 1) for j in range(n)] for i in range(n)])
        x_true = np.ones(n)
        with mpmath.workdps(50):
            # exact row sums of the float64-rounded matrix, split into hi+lo
            b_exact = [sum(mpmath.mpf(v) for v in row) for row in h]
            bh = np.array([float(v) for v in b_exact])
            bl = np.array([float(v - mpmath.mpf(float(v)))
                           for v in b_exact])
        xh, xl = dd.lu_solve(h, np.zeros_like(h), bh, bl)
        err_dd = np.abs(dd.to_float(xh, xl) - x_true).max()
        err_double = np.abs(np.linalg.solve(h, bh) - x_true).max()
        assert err_dd < 1e-12 < err_double

    def test_singular_raises(self):
        a = np.zeros((3, 3))
        with pytest.raises(np.linalg.LinAlgError):
            dd.lu_solve(a, np.zeros_like(a), np.ones(3), np.zeros(3))


def test_residual_max_known_value():
    a = np.eye(2)
    az = np.zeros_like(a)
    x = np.array([1.0, 2.0])
    b = np.array([1.0, 2.5])
    assert dd.residual_max(a, az, x, np.zeros(2), b, np.zeros(2)) == \
        pytest.approx(0.5)
