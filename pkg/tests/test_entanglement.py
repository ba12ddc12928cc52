"""Unit tests for block entanglement entropy of symmetric states."""

import numpy as np
import pytest

from dicke_css.entanglement import (Bipartition, SymmetricState,
                                    brute_force_entropy, dicke_schmidt_probs,
                                    entropy_dicke, entropy_symmetric,
                                    schmidt_amplitude_table)


def random_state(n, rng):
    amps = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return SymmetricState(amps=amps / np.linalg.norm(amps), n=n)


class TestBipartition:
    def test_default_half_split(self):
        assert Bipartition(n=9).n_b == 4
        assert Bipartition(n=9).n_a == 5

    def test_invalid(self):
        with pytest.raises(ValueError):
            Bipartition(n=4, n_b=0)
        with pytest.raises(ValueError):
            Bipartition(n=4, n_b=4)


class TestSymmetricState:
    def test_length_check(self):
        with pytest.raises(ValueError):
            SymmetricState(amps=np.zeros(3, dtype=complex), n=3)

    def test_css_normalized(self):
        for theta in (0.0, 0.7, np.pi / 2, 2.9):
            s = SymmetricState.css(8, theta, 0.3)
            assert s.norm_sq() == pytest.approx(1.0, abs=1e-12)

    def test_css_poles(self):
        up = SymmetricState.css(4, 0.0)
        assert np.abs(up.amps) == pytest.approx([0, 0, 0, 0, 1])
        down = SymmetricState.css(4, np.pi)
        assert np.abs(down.amps) == pytest.approx([1, 0, 0, 0, 0], abs=1e-15)


class TestDickeSchmidtProbs:
    def test_product_state(self):
        assert dicke_schmidt_probs(4, 0, 2) == pytest.approx([1, 0, 0])

    def test_n4_m2_half(self):
        assert dicke_schmidt_probs(4, 2, 2) == \
            pytest.approx([1 / 6, 4 / 6, 1 / 6])

    def test_bell_like(self):
        assert dicke_schmidt_probs(2, 1, 1) == pytest.approx([0.5, 0.5])

    def test_normalization(self):
        for n, m, nb in [(6, 3, 2), (9, 5, 4), (12, 1, 6)]:
            assert dicke_schmidt_probs(n, m, nb).sum() == pytest.approx(1.0)

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            dicke_schmidt_probs(4, 5, 2)


class TestEntropyDicke:
    def test_separable(self):
        assert entropy_dicke(8, 0, 4) == 0.0
        assert entropy_dicke(8, 8, 4) == 0.0

    def test_bell(self):
        assert entropy_dicke(2, 1, 1) == pytest.approx(1.0)

    def test_n4_m2(self):
        assert entropy_dicke(4, 2, 2) == pytest.approx(1.2516291673878228,
                                                       abs=1e-12)

    @pytest.mark.parametrize("n", [4, 6, 8, 10, 12])
    def test_half_split_is_maximal(self, n):
        for m in range(n + 1):
            best = entropy_dicke(n, m, n // 2)
            for nb in range(1, n):
                assert entropy_dicke(n, m, nb) <= best + 1e-12

    def test_log_scaling(self):
        # S(N, N/2, N/2) grows like (1/2) log2 N: each doubling of N adds a
        # bounded increment approaching half a bit, and S is concave in N
        ns = [8, 16, 32, 64, 128]
        s = [entropy_dicke(n, n // 2, n // 2) for n in ns]
        incr = np.diff(s)
        assert (incr > 0).all() and (incr < 0.5).all()
        lin = [entropy_dicke(n, n // 2, n // 2) for n in (8, 16, 24, 32, 40)]
        assert (np.diff(np.diff(lin)) < 0).all()

    def test_entropy_bound(self):
        for n, m, nb in [(10, 5, 5), (10, 3, 4), (12, 6, 6)]:
            assert 0.0 <= entropy_dicke(n, m, nb) <= np.log2(nb + 1)


class TestEntropySymmetric:
    def test_matches_dicke_formula(self):
        for n, k, nb in [(6, 3, 3), (8, 2, 4), (9, 5, 4)]:
            s = SymmetricState.dicke(n, k)
            assert entropy_symmetric(s, Bipartition(n=n, n_b=nb)) == \
                pytest.approx(entropy_dicke(n, k, nb), abs=1e-12)

    def test_css_is_product(self):
        for theta, phi in [(np.pi / 2, 0.0), (0.8, 1.1), (2.5, -0.4)]:
            s = SymmetricState.css(8, theta, phi)
            for nb in (2, 4, 6):
                assert entropy_symmetric(s, Bipartition(n=8, n_b=nb)) == \
                    pytest.approx(0.0, abs=1e-12)

    def test_rejects_unnormalized(self):
        s = SymmetricState(amps=np.ones(5, dtype=complex), n=4)
        with pytest.raises(ValueError):
            entropy_symmetric(s, Bipartition(n=4))

    def test_random_vs_brute_force(self):
        rng = np.random.default_rng(5)
        for n in (4, 6, 8):
            for _ in range(5):
                s = random_state(n, rng)
                for nb in (1, n // 2):
                    part = Bipartition(n=n, n_b=nb)
                    assert entropy_symmetric(s, part) == pytest.approx(
                        brute_force_entropy(s, part), abs=1e-10)


class TestBruteForce:
    def test_pole_state(self):
        s = SymmetricState.dicke(6, 6)
        assert brute_force_entropy(s, Bipartition(n=6)) == 0.0

    def test_bell(self):
        s = SymmetricState.dicke(2, 1)
        assert brute_force_entropy(s, Bipartition(n=2, n_b=1)) == \
            pytest.approx(1.0)

    def test_dicke_cross_check(self):
        s = SymmetricState.dicke(6, 3)
        assert brute_force_entropy(s, Bipartition(n=6, n_b=3)) == \
            pytest.approx(entropy_dicke(6, 3, 3), abs=1e-12)

    def test_capacity_limit(self):
        s = SymmetricState.dicke(13, 5)
        with pytest.raises(ValueError):
            brute_force_entropy(s, Bipartition(n=13))


def test_schmidt_amplitude_table_consistency():
    # squared table columns at fixed m reproduce the Dicke spectrum
    n, nb = 7, 3
    table = schmidt_amplitude_table(n, nb)
    for m in range(n + 1):
        assert table[:, m] ** 2 == pytest.approx(
            dicke_schmidt_probs(n, m, nb), abs=1e-14)
