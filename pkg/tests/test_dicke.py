"""Unit tests for the exact symmetric-sector decay solver."""

import numpy as np
import pytest

from dicke_css.dicke import (DickePopulations, ModelParams, beta_sq,
                             beta_sq_vector, build_generator, burst_time,
                             default_time_grid, emission_rate,
                             evolution_matrix, evolve_exact, evolve_ode)


class TestModelParams:
    def test_valid(self):
        p = ModelParams(n_emitters=5, gamma=2.0)
        assert p.n_emitters == 5 and p.gamma == 2.0

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            ModelParams(n_emitters=0)

    def test_invalid_gamma(self):
        with pytest.raises(ValueError):
            ModelParams(n_emitters=2, gamma=0.0)


class TestBetaSq:
    def test_zero_excitations(self):
        assert beta_sq(0, 5) == 0.0

    def test_n2_values(self):
        assert beta_sq(2, 2) == 1.0
        assert beta_sq(1, 2) == 1.0

    def test_peak_at_half(self):
        # m(N-m+1)/N is maximal near m = (N+1)/2
        n = 10
        vals = [beta_sq(m, n) for m in range(n + 1)]
        assert np.argmax(vals) in (5, 6)
        assert max(vals) == pytest.approx((n / 2 + 1) ** 2 / n - 1 / (4 * n),
                                          rel=0.2)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            beta_sq(-1, 5)
        with pytest.raises(ValueError):
            beta_sq(6, 5)
        with pytest.raises(ValueError):
            beta_sq(0, 0)

    def test_vector_matches_scalar(self):
        n = 7
        vec = beta_sq_vector(n)
        assert vec == pytest.approx([beta_sq(m, n) for m in range(n + 1)])


class TestGenerator:
    def test_n2_rates(self):
        gen = build_generator(ModelParams(n_emitters=2, gamma=1.5))
        assert gen.diag == pytest.approx([0.0, -1.5, -1.5])
        assert gen.subflow == pytest.approx([1.5, 1.5])

    def test_n1_rates(self):
        gen = build_generator(ModelParams(n_emitters=1))
        assert gen.diag == pytest.approx([0.0, -1.0])
        assert gen.subflow == pytest.approx([1.0])

    @pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
    def test_column_sums_exactly_zero(self, n):
        gen = build_generator(ModelParams(n_emitters=n))
        assert (gen.matrix().sum(axis=0) == 0.0).all()

    def test_matrix_is_bidiagonal(self):
        mat = build_generator(ModelParams(n_emitters=4)).matrix()
        assert mat == pytest.approx(np.triu(np.tril(mat, 1)))


class TestEvolutionMatrix:
    def test_t0_identity(self):
        gen = build_generator(ModelParams(n_emitters=4))
        assert evolution_matrix(gen, 0.0).entries == pytest.approx(np.eye(5))

    def test_negative_t_rejected(self):
        gen = build_generator(ModelParams(n_emitters=2))
        with pytest.raises(ValueError):
            evolution_matrix(gen, -0.1)

    @pytest.mark.parametrize("n,t", [(2, 1.0), (10, 3.0), (50, 20.0)])
    def test_stochasticity(self, n, t):
        a = evolution_matrix(build_generator(ModelParams(n_emitters=n)), t).entries
        assert a.sum(axis=0) == pytest.approx(np.ones(n + 1), abs=1e-12)
        assert (a > -1e-12).all() and (a < 1 + 1e-12).all()

    def test_n2_closed_form_column(self):
        a = evolution_matrix(build_generator(ModelParams(n_emitters=2)), 1.0).entries
        e = np.exp(-1.0)
        assert a[:, 2] == pytest.approx([1 - 2 * e, e, e], abs=1e-12)

    def test_semigroup(self):
        gen = build_generator(ModelParams(n_emitters=8))
        rng = np.random.default_rng(3)
        for t1, t2 in rng.uniform(0, 5, size=(5, 2)):
            lhs = evolution_matrix(gen, t1 + t2).entries
            rhs = evolution_matrix(gen, t1).entries @ evolution_matrix(gen, t2).entries
            assert np.abs(lhs - rhs).max() < 1e-9


class TestEvolveExact:
    def test_initial_condition(self):
        pops = evolve_exact(ModelParams(n_emitters=6), [0.0])[0]
        assert pops.probs == pytest.approx([0, 0, 0, 0, 0, 0, 1])
        assert pops.n == 6

    def test_n2_closed_form(self):
        pops = evolve_exact(ModelParams(n_emitters=2), [1.0])[0]
        e = np.exp(-1.0)
        assert pops.probs == pytest.approx([1 - 2 * e, e, e], abs=1e-12)

    def test_dark_state_limit(self):
        pops = evolve_exact(ModelParams(n_emitters=10), [50.0])[0]
        target = np.zeros(11)
        target[0] = 1.0
        assert pops.probs == pytest.approx(target, abs=1e-8)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            evolve_exact(ModelParams(n_emitters=2), [])

    def test_unsorted_grid_rejected(self):
        with pytest.raises(ValueError):
            evolve_exact(ModelParams(n_emitters=2), [1.0, 0.5])

    def test_normalization_and_monotone_absorption(self):
        grid = np.linspace(0, 12, 60)
        pops = evolve_exact(ModelParams(n_emitters=12), grid)
        sums = [p.probs.sum() for p in pops]
        assert sums == pytest.approx(np.ones(len(grid)), abs=1e-12)
        ground = np.array([p.probs[0] for p in pops])
        assert (np.diff(ground) >= -1e-13).all()

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_ode_cross_check(self, n):
        grid = np.linspace(0, 8, 30)
        a = evolve_exact(ModelParams(n_emitters=n), grid)
        b = evolve_ode(ModelParams(n_emitters=n), grid)
        dev = max(np.abs(x.probs - y.probs).max() for x, y in zip(a, b))
        assert dev < 1e-9


class TestEmissionRate:
    def test_fully_inverted(self):
        pops = DickePopulations(probs=np.r_[np.zeros(7), 1.0], time=0.0)
        assert emission_rate(pops, ModelParams(n_emitters=7, gamma=2.0)) == \
            pytest.approx(2.0)

    def test_ground_state(self):
        pops = DickePopulations(probs=np.r_[1.0, np.zeros(7)], time=0.0)
        assert emission_rate(pops, ModelParams(n_emitters=7)) == 0.0

    def test_burst_peak_near_log_n(self):
        params = ModelParams(n_emitters=30)
        grid = np.linspace(0.0, 8.0, 400)
        rates = [emission_rate(p, params)
                 for p in evolve_exact(params, grid)]
        t_peak = grid[int(np.argmax(rates))]
        assert abs(t_peak - np.log(30)) < 0.25 * np.log(30)


def test_burst_time():
    assert burst_time(ModelParams(n_emitters=30, gamma=2.0)) == \
        pytest.approx(np.log(30) / 2.0)


def test_default_time_grid():
    grid = default_time_grid(ModelParams(n_emitters=5, gamma=2.0))
    assert grid[0] == 0.0 and grid[-1] == pytest.approx(6.0)
    assert len(grid) == 1200
