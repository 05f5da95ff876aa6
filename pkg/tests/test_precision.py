import numpy as np
import pytest

from lass.model import TwoClassGaussianModel, sample_dataset
from lass.precision import PrecisionMethod, estimate_precision, pooled_covariance
from lass.simharness import gen_precision


@pytest.fixture
def data():
    rng = np.random.default_rng(4)
    return rng.normal(size=(30, 5)), rng.normal(1.0, 1.0, size=(25, 5))


@pytest.mark.parametrize(
    "text,expected",
    [
        ("oracle", PrecisionMethod("oracle")),
        ("PINV", PrecisionMethod("pinv")),
        ("ridge:0.5", PrecisionMethod("ridge", 0.5)),
        ("diagonal", PrecisionMethod("diagonal")),
    ],
)
def test_parse(text, expected):
    assert PrecisionMethod.parse(text) == expected


@pytest.mark.parametrize("text", ["ridge", "ridge:-1", "ridge:abc", "lasso", "pinv:3"])
def test_parse_rejects(text):
    with pytest.raises(ValueError):
        PrecisionMethod.parse(text)


def test_str_round_trip():
    for m in (PrecisionMethod("ridge", 0.25), PrecisionMethod("identity")):
        assert PrecisionMethod.parse(str(m)) == m


def test_identity(data):
    np.testing.assert_array_equal(estimate_precision(PrecisionMethod("identity"), *data), np.eye(5))


def test_oracle_requires_truth(data):
    with pytest.raises(ValueError, match="true precision"):
        estimate_precision(PrecisionMethod("oracle"), *data)
    truth = np.diag(np.arange(1.0, 6.0))
    np.testing.assert_array_equal(estimate_precision(PrecisionMethod("oracle"), *data, true_precision=truth), truth)


def test_diagonal_hand_values():
    # pooled column variances: (2 + 2) / 2 = 2 and (4 + 4) / 2 = 4
    x = np.array([[0.0, 0.0], [2.0, 2.0 * np.sqrt(2)]])
    y = np.array([[1.0, 0.0], [3.0, 2.0 * np.sqrt(2)]])
    prec = estimate_precision(PrecisionMethod("diagonal"), x, y)
    np.testing.assert_allclose(prec, np.diag([0.5, 0.25]), rtol=1e-12)


def test_diagonal_degenerate():
    x = np.array([[1.0, 0.0], [1.0, 1.0]])
    y = np.array([[1.0, 2.0], [1.0, 0.0]])
    with pytest.raises(ValueError, match="degenerate coordinate"):
        estimate_precision(PrecisionMethod("diagonal"), x, y)


def test_pinv_matches_inverse_when_full_rank(data):
    cov = pooled_covariance(*data)
    np.testing.assert_allclose(estimate_precision(PrecisionMethod("pinv"), *data), np.linalg.inv(cov), atol=1e-8)


def test_pinv_rank_deficient_is_moore_penrose():
    rng = np.random.default_rng(5)
    x, y = rng.normal(size=(4, 10)), rng.normal(size=(3, 10))
    est = estimate_precision(PrecisionMethod("pinv"), x, y)
    cov = pooled_covariance(x, y)
    np.testing.assert_allclose(cov @ est @ cov, cov, atol=1e-10)
    np.testing.assert_allclose(est @ cov @ est, est, atol=1e-8)


@pytest.mark.parametrize("method", ["identity", "diagonal", "pinv", "ridge:0.1"])
def test_symmetric(data, method):
    est = estimate_precision(PrecisionMethod.parse(method), *data)
    assert np.abs(est - est.T).max() <= 1e-10


def test_ridge_positive_definite_even_when_singular():
    rng = np.random.default_rng(6)
    x, y = rng.normal(size=(3, 20)), rng.normal(size=(3, 20))
    est = estimate_precision(PrecisionMethod("ridge", 1e-3), x, y)
    assert np.linalg.eigvalsh(est)[0] > 0


def test_consistency_with_growing_n():
    omega = gen_precision("ar1", 20)
    model = TwoClassGaussianModel.from_precision(np.zeros(20), np.ones(20), omega)
    errs = {"pinv": [], "ridge": []}
    for i, n in enumerate((100, 1000, 10_000)):
        x, y, _ = sample_dataset(model, n, n, 1, seed=100 + i)
        errs["pinv"].append(np.linalg.norm(estimate_precision(PrecisionMethod("pinv"), x, y) - omega, 2))
        lam = 1.0 / np.sqrt(n)
        errs["ridge"].append(np.linalg.norm(estimate_precision(PrecisionMethod("ridge", lam), x, y) - omega, 2))
    for v in errs.values():
        assert v[0] > v[1] > v[2]
        assert v[2] < 0.1
