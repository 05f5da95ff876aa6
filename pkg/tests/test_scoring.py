import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lass.model import TwoClassGaussianModel, oracle_posterior, oracle_risk, sample_dataset
from lass.precision import PrecisionMethod
from lass.scoring import fit, fit_naive, oracle_scores, score_batch


@pytest.fixture
def train():
    rng = np.random.default_rng(8)
    x = rng.normal(0.0, 1.0, (20, 6))
    x[:, 0] += 3.0
    return x, rng.normal(0.0, 1.0, (22, 6))


def test_identical_training_gives_zero_scores():
    x = np.random.default_rng(0).normal(size=(5, 3))
    trained = fit(x, x.copy(), method="identity")
    np.testing.assert_array_equal(trained.direction, 0.0)
    sb = score_batch(trained, np.random.default_rng(1).normal(size=(4, 3)))
    np.testing.assert_array_equal(sb.s_hat, 0.0)
    np.testing.assert_array_equal(sb.t_hat, 0.5)


def test_identity_precision_direction_is_dhat(train):
    trained = fit(*train, method="identity")
    np.testing.assert_array_equal(trained.direction, trained.d_hat)
    assert trained.d_hat[0] > 2.0
    np.testing.assert_array_equal(trained.center, (trained.xbar + trained.ybar) / 2)


def test_direction_cached(train):
    trained = fit(*train, method=PrecisionMethod("ridge", 0.5))
    np.testing.assert_allclose(trained.direction, trained.precision_hat @ trained.d_hat, atol=1e-10)


def test_center_scores_half(train):
    trained = fit(*train, method="pinv")
    sb = score_batch(trained, trained.center[None, :])
    assert sb.s_hat[0] == pytest.approx(0.0, abs=1e-12)
    assert sb.t_hat[0] == pytest.approx(0.5, abs=1e-12)


def test_dimension_mismatch(train):
    trained = fit(*train, method="identity")
    with pytest.raises(ValueError):
        score_batch(trained, np.zeros((2, 5)))
    with pytest.raises(ValueError):
        fit(np.zeros((3, 2)), np.zeros((3, 3)))


def test_oracle_method_needs_truth(train):
    with pytest.raises(ValueError):
        fit(*train, method="oracle")


def test_t_monotone_in_s(train):
    trained = fit(*train, method="ridge:1.0")
    pts = np.random.default_rng(3).normal(size=(200, 6)) * 5
    sb = score_batch(trained, pts)
    np.testing.assert_array_equal(np.argsort(sb.s_hat, kind="stable"), np.argsort(sb.t_hat, kind="stable"))
    assert ((sb.t_hat > 0) & (sb.t_hat < 1)).all()


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, 6, elements=st.floats(-50, 50)))
def test_translation_invariance(shift):
    rng = np.random.default_rng(10)
    x, y = rng.normal(1, 1, (15, 6)), rng.normal(0, 1, (14, 6))
    w = rng.normal(size=(7, 6))
    a = score_batch(fit(x, y, method="ridge:1.0"), w).s_hat
    b = score_batch(fit(x + shift, y + shift, method="ridge:1.0"), w + shift).s_hat
    np.testing.assert_allclose(a, b, atol=1e-8 * (1 + np.abs(shift).max()))


def test_label_swap_antisymmetry(train):
    x, y = train
    w = np.random.default_rng(12).normal(size=(9, 6))
    a = score_batch(fit(x, y, method="ridge:1.0"), w)
    b = score_batch(fit(y, x, method="ridge:1.0"), w)
    np.testing.assert_allclose(b.s_hat, -a.s_hat, atol=1e-12)
    np.testing.assert_allclose(b.t_hat, 1 - a.t_hat, atol=1e-12)


def test_naive_uses_raw_difference(train):
    trained = fit_naive(*train)
    np.testing.assert_array_equal(trained.d_hat, trained.xbar - trained.ybar)
    assert trained.shrink is None


def test_oracle_precision_error_near_bayes_risk():
    # sparse shift, five points per class, true precision: error within 2 points of the Bayes risk
    p = 625
    mu2 = np.zeros(p)
    mu2[:50] = 2.5
    model = TwoClassGaussianModel(np.zeros(p), mu2, 0.5 * np.eye(p))
    errs = []
    for rep in range(20):
        x, y, batch = sample_dataset(model, 5, 5, 500, seed=rep)
        t = score_batch(fit(x, y, b=0.0, method="oracle", true_precision=model.precision), batch).t_hat
        errs.append((np.where(t > 0.5, 1, 2) != batch.true_labels).mean())
    assert abs(np.mean(errs) - oracle_risk(model)) < 0.02


def test_posterior_consistency_with_n():
    """E(T_hat - T)^2 shrinks as the training size grows (oracle precision)."""
    p = 30
    mu2 = np.zeros(p)
    mu2[:3] = 1.0
    model = TwoClassGaussianModel(np.zeros(p), mu2, np.eye(p))
    mse = []
    for n in (50, 500, 5000):
        vals = []
        for rep in range(10):
            x, y, batch = sample_dataset(model, n, n, 400, seed=1000 * n + rep)
            t_hat = score_batch(fit(x, y, method="oracle", true_precision=model.precision), batch).t_hat
            vals.append(np.mean((t_hat - oracle_posterior(batch.points, model)) ** 2))
        mse.append(np.mean(vals))
    assert mse[0] > mse[1] > mse[2]


def test_oracle_scores_match_model():
    model = TwoClassGaussianModel(np.array([1.0]), np.array([-1.0]), np.eye(1))
    sb = oracle_scores(np.array([[1.0], [0.0]]), model)
    np.testing.assert_allclose(sb.s_hat, [2.0, 0.0])
    assert sb.t_hat[0] == pytest.approx(math.exp(2) / (1 + math.exp(2)))
