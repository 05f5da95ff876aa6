import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lass.shrinkage import (
    BOUNDARY,
    G1,
    G2,
    G3,
    ShrinkageConfig,
    classify_signal_groups,
    demarcation_scale,
    fit_shrinkage,
    pooled_variance,
    shrink_factor,
)

FIG1 = ShrinkageConfig(n1=5, n2=5, p=625, b=0.0)


def q_direct(delta, sigma_hat, cfg, dps=50):
    """Ratio of raw normal densities at 50-digit precision."""
    with mp.workdps(dps):
        tau = mp.sqrt(mp.mpf(cfg.n1 + cfg.n2) / (cfg.n1 * cfg.n2))
        c = 2 + mp.mpf(cfg.b)
        s = mp.mpf(sigma_hat)
        a = c * mp.sqrt(s) + mp.sqrt(c**2 * s + 4)
        loc = a * mp.sqrt(mp.mpf(cfg.n1 + cfg.n2) / (2 * cfg.n1 * cfg.n2) * mp.log(cfg.p))
        x = abs(mp.mpf(delta))
        g0 = mp.npdf(x, 0, tau)
        g1 = mp.npdf(x, loc, tau)
        return float(g1 / (g0 + g1))


class TestPooledVariance:
    def test_constant_columns(self):
        assert pooled_variance([[1.0], [1.0]], [[2.0], [2.0]])[0] == 0.0

    def test_hand_value(self):
        assert pooled_variance([[0.0], [2.0]], [[1.0], [3.0]])[0] == pytest.approx(2.0)

    def test_insufficient_dof(self):
        with pytest.raises(ValueError, match="degrees of freedom"):
            pooled_variance([[1.0]], [[2.0]])

    def test_large_sample(self):
        rng = np.random.default_rng(0)
        v = pooled_variance(rng.normal(0, 2, (10_000, 3)), rng.normal(5, 2, (10_000, 3)))
        np.testing.assert_allclose(v, 4.0, atol=0.1)


class TestShrinkFactor:
    def test_crossing_point(self):
        half = demarcation_scale(0.5, FIG1)
        assert half == pytest.approx(2.19, abs=0.005)
        assert shrink_factor(half, 0.5, FIG1) == pytest.approx(0.5, abs=1e-12)

    def test_at_zero_matches_direct_densities(self):
        q0 = shrink_factor(0.0, 0.5, FIG1)
        assert q0 == pytest.approx(q_direct(0.0, 0.5, FIG1), rel=1e-9)
        assert q0 == pytest.approx(3.7e-11, rel=0.05)

    @pytest.mark.parametrize("delta", [0.3, 1.0, 2.0, 2.19, 3.0, 5.0, -1.7])
    @pytest.mark.parametrize("sigma_hat", [0.0, 0.5, 2.0])
    def test_matches_direct_densities(self, delta, sigma_hat):
        cfg = ShrinkageConfig(7, 9, 300, 0.1)
        assert shrink_factor(delta, sigma_hat, cfg) == pytest.approx(q_direct(delta, sigma_hat, cfg), rel=1e-9, abs=1e-300)

    def test_at_signal_location(self):
        loc = 2 * demarcation_scale(0.5, FIG1)
        expected = 1 / (1 + math.exp(-(loc**2) / (2 * FIG1.tau_sq)))
        assert shrink_factor(loc, 0.5, FIG1) == pytest.approx(expected, rel=1e-12)
        assert expected > 0.5

    def test_p_one_is_half(self):
        cfg = ShrinkageConfig(10, 10, 1)
        np.testing.assert_array_equal(shrink_factor(np.array([0.0, 1.0, 100.0]), 1.0, cfg), 0.5)

    @given(st.floats(0, 50), st.floats(0.01, 10))
    def test_even_and_bounded(self, delta, sigma_hat):
        cfg = ShrinkageConfig(20, 30, 400, 0.1)
        q = shrink_factor(delta, sigma_hat, cfg)
        assert q == shrink_factor(-delta, sigma_hat, cfg)
        assert 0.0 <= q <= 1.0

    def test_strictly_increasing_and_interior(self):
        cfg = ShrinkageConfig(20, 30, 400, 0.1)
        grid = np.linspace(0, 1.5, 400)
        q = shrink_factor(grid, 1.0, cfg)
        assert (np.diff(q) > 0).all()
        assert ((q > 0) & (q < 1)).all()

    def test_huge_delta_is_finite(self):
        q = shrink_factor(np.array([1e3, 1e6, -1e6]), 0.5, FIG1)
        assert np.isfinite(q).all() and (q <= 1).all()
        assert q[1] == 1.0

    def test_negative_variance_rejected(self):
        with pytest.raises(ValueError):
            shrink_factor(1.0, -0.1, FIG1)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            ShrinkageConfig(5, 5, 10, b=-1)
        with pytest.raises(ValueError):
            ShrinkageConfig(1, 5, 10)


class TestFitShrinkage:
    def test_identical_samples(self):
        x = np.random.default_rng(1).normal(size=(6, 4))
        est = fit_shrinkage(x, x.copy())
        np.testing.assert_array_equal(est.raw_diff, 0.0)
        np.testing.assert_array_equal(est.d_hat, 0.0)

    def test_single_coordinate_matches_shrink_factor(self):
        rng = np.random.default_rng(2)
        x, y = rng.normal(1, 1, (8, 5)), rng.normal(0, 1, (9, 5))
        est = fit_shrinkage(x, y, b=0.1)
        k = 3
        q = shrink_factor(est.raw_diff[k], est.pooled_var[k], ShrinkageConfig(8, 9, 5, 0.1))
        assert est.q[k] == q
        assert est.d_hat[k] == est.raw_diff[k] * q

    def test_invariants(self):
        rng = np.random.default_rng(3)
        est = fit_shrinkage(rng.normal(0.3, 1, (10, 50)), rng.normal(0, 1, (12, 50)))
        assert ((est.q > 0) & (est.q < 1)).all()
        assert (np.abs(est.d_hat) <= np.abs(est.raw_diff)).all()
        assert (np.sign(est.d_hat) == np.sign(est.raw_diff)).all()
        assert (est.pooled_var >= 0).all()

    def test_sparse_denoising_five_per_class(self):
        # n = 5 per class, p = 625, 50 coordinates at 2.5, Sigma = I/2, b = 0.
        # Quadrature over the raw difference and the chi-square pooled variance
        # gives E d_hat = 1.92733 on signal coordinates, E|d_hat| = 2.05e-4 on zeros.
        rng = np.random.default_rng(2023)
        d = np.zeros(625)
        d[:50] = 2.5
        zero_abs, signal = [], []
        for _ in range(100):
            x = rng.normal(0, math.sqrt(0.5), (5, 625))
            y = d + rng.normal(0, math.sqrt(0.5), (5, 625))
            est = fit_shrinkage(y, x, b=0.0)
            zero_abs.append(np.abs(est.d_hat[50:]).mean())
            signal.append(est.d_hat[:50].mean())
        assert np.mean(zero_abs) < 0.05
        assert np.mean(zero_abs) == pytest.approx(2.05498e-4, abs=2e-4)
        assert np.mean(signal) == pytest.approx(1.92733, abs=0.03)


class TestSignalGroups:
    cfg = ShrinkageConfig(5, 5, 625, 0.0)

    def test_zero_is_weak(self):
        assert classify_signal_groups([0.0], [0.5], self.cfg, 0.05)[0] == G2

    def test_strong_signal_group(self):
        assert classify_signal_groups([2.5], [0.5], self.cfg, 0.1)[0] == G1

    def test_demarcation_edge_is_boundary(self):
        half = demarcation_scale(0.5, self.cfg)
        assert classify_signal_groups([half], [0.5], self.cfg, 0.01)[0] == BOUNDARY

    def test_moderate(self):
        half = demarcation_scale(0.5, self.cfg)
        assert classify_signal_groups([0.5 * half], [0.5], self.cfg, 0.05)[0] == G3

    def test_epsilon_positive(self):
        with pytest.raises(ValueError):
            classify_signal_groups([1.0], [1.0], self.cfg, 0.0)


def test_group_means_match_quadrature():
    """Monte Carlo mean of q per group agrees with frozen quadrature values.

    The expected values integrate the raw-density ratio against
    N(d, tau^2) and the scaled chi-square law of the pooled variance
    (p = 625, n1 = n2 = 50, Sigma = I, b = 0.1).
    """
    cfg = ShrinkageConfig(50, 50, 625, 0.1)
    half = float(demarcation_scale(1.0, cfg))
    d = np.zeros(625)
    d[:50] = 1.6 * half
    d[50:100] = 0.4 * half
    rng = np.random.default_rng(77)
    qs = []
    for _ in range(200):
        x = d + rng.standard_normal((50, 625))
        y = rng.standard_normal((50, 625))
        qs.append(fit_shrinkage(x, y, 0.1).q)
    qs = np.array(qs)
    assert qs[:, :50].mean() == pytest.approx(0.9948899887, abs=0.002)
    assert qs[:, 50:100].mean() == pytest.approx(0.0051794115, abs=0.0015)
    assert qs[:, 100:].mean() == pytest.approx(1.9536e-05, abs=2e-5)
