"""Two-class Gaussian model, seeded sampling and closed-form oracle quantities."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TwoClassGaussianModel",
    "LabeledSample",
    "TestBatch",
    "make_rng",
    "normal_cdf",
    "logistic",
    "sample_dataset",
    "oracle_score",
    "oracle_posterior",
    "oracle_risk",
]


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Generator keyed by ``(seed, *stream)``.

    Different stream ids give statistically independent generators, so
    replications never share state no matter which worker runs them.
    """
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream)))


def normal_cdf(x):
    """Standard normal CDF via ``erfc`` (accurate in both tails)."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(-float(x) / math.sqrt(2.0))
    from scipy.special import erfc

    return 0.5 * erfc(-np.asarray(x, dtype=float) / np.sqrt(2.0))


_T_LO = 1e-300
_T_HI = float(np.nextafter(1.0, 0.0))


def logistic(s):
    """Numerically stable ``exp(s) / (1 + exp(s))`` kept strictly inside (0, 1).

    The two branches avoid overflow of ``exp`` for large ``|s|``; results are
    clamped to ``[1e-300, 1 - 2**-53]`` so downstream thresholding never sees
    an exact 0 or 1.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    pos = s >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-s[pos]))
    e = np.exp(s[~pos])
    out[~pos] = e / (1.0 + e)
    np.clip(out, _T_LO, _T_HI, out=out)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class TwoClassGaussianModel:
    """Ground truth ``N(mu1, sigma)`` vs ``N(mu2, sigma)`` with equal priors.

    Parameters
    ----------
    mu1, mu2 : array of shape (p,)
        Class means.
    sigma : array of shape (p, p)
        Common covariance; must be symmetric positive definite.
    precision : array of shape (p, p), optional
        Inverse of ``sigma``. Computed when omitted. Supply it when the model
        is specified through its precision matrix so the exact entries are kept.
    eps0 : float
        Bound for the diagonal condition ``eps0 <= sigma_kk <= 1/eps0``.
    """

    mu1: np.ndarray
    mu2: np.ndarray
    sigma: np.ndarray
    precision: np.ndarray = None
    eps0: float = 1e-3
    _chol: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        mu1 = np.array(self.mu1, dtype=float).ravel()
        mu2 = np.array(self.mu2, dtype=float).ravel()
        sigma = np.array(self.sigma, dtype=float)
        p = mu1.size
        if mu2.size != p or sigma.shape != (p, p):
            raise ValueError(f"inconsistent dimensions: mu1 {mu1.shape}, mu2 {mu2.shape}, sigma {sigma.shape}")
        if not np.allclose(sigma, sigma.T, rtol=0, atol=1e-10):
            raise ValueError("sigma is not symmetric")
        sigma = 0.5 * (sigma + sigma.T)
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError:
            raise ValueError("sigma is not positive definite") from None
        diag = np.diag(sigma)
        if diag.min() < self.eps0 or diag.max() > 1.0 / self.eps0:
            raise ValueError(
                f"diag(sigma) in [{diag.min():.3g}, {diag.max():.3g}] violates eps0={self.eps0}"
            )
        if self.precision is None:
            prec = np.linalg.inv(sigma)
        else:
            prec = np.array(self.precision, dtype=float)
            if prec.shape != (p, p):
                raise ValueError("precision has wrong shape")
        prec = 0.5 * (prec + prec.T)
        if not np.allclose(prec @ sigma, np.eye(p), rtol=0, atol=1e-8):
            raise ValueError("precision is not the inverse of sigma")
        for name, arr in (("mu1", mu1), ("mu2", mu2), ("sigma", sigma), ("precision", prec), ("_chol", chol)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_precision(cls, mu1, mu2, precision, eps0: float = 1e-3) -> "TwoClassGaussianModel":
        """Build the model from ``Sigma^{-1}``; ``sigma`` is its dense inverse."""
        omega = np.array(precision, dtype=float)
        omega = 0.5 * (omega + omega.T)
        sigma = np.linalg.inv(omega)
        sigma = 0.5 * (sigma + sigma.T)
        return cls(mu1, mu2, sigma, precision=omega, eps0=eps0)

    @property
    def p(self) -> int:
        return self.mu1.size

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.mu1 + self.mu2)

    @property
    def d(self) -> np.ndarray:
        return self.mu1 - self.mu2

    @property
    def delta_sq(self) -> float:
        """Squared Mahalanobis separation ``d' Sigma^{-1} d``."""
        d = self.d
        return float(d @ self.precision @ d)

    @property
    def cholesky(self) -> np.ndarray:
        """Lower Cholesky factor of ``sigma``."""
        return self._chol


@dataclass(frozen=True)
class LabeledSample:
    features: np.ndarray
    label: int

    def __post_init__(self):
        if self.label not in (1, 2):
            raise ValueError(f"label must be 1 or 2, got {self.label!r}")


@dataclass(frozen=True)
class TestBatch:
    """``m`` points to classify; ``true_labels`` is known only in simulation."""

    points: np.ndarray
    true_labels: np.ndarray | None = None

    __test__ = False  # not a pytest class

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] < 1:
            raise ValueError("a test batch needs at least one point")
        object.__setattr__(self, "points", pts)
        if self.true_labels is not None:
            lab = np.asarray(self.true_labels, dtype=int).ravel()
            if lab.size != pts.shape[0]:
                raise ValueError(f"{lab.size} labels for {pts.shape[0]} points")
            if not np.isin(lab, (1, 2)).all():
                raise ValueError("labels must be in {1, 2}")
            object.__setattr__(self, "true_labels", lab)

    @property
    def m(self) -> int:
        return self.points.shape[0]


def _draw(model: TwoClassGaussianModel, means: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal(means.shape)
    return means + z @ model.cholesky.T


def sample_dataset(model: TwoClassGaussianModel, n1: int, n2: int, m: int, seed: int | np.random.Generator):
    """Draw training samples from both classes and a labelled test batch.

    Test labels are Bernoulli(1/2). Passing an integer seed gives a fixed
    stream; a ``Generator`` is consumed in place.

    Returns
    -------
    x : array of shape (n1, p)
    y : array of shape (n2, p)
    batch : TestBatch
    """
    if min(n1, n2, m) < 1:
        raise ValueError("n1, n2 and m must all be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else make_rng(seed)
    p = model.p
    x = _draw(model, np.broadcast_to(model.mu1, (n1, p)), rng)
    y = _draw(model, np.broadcast_to(model.mu2, (n2, p)), rng)
    labels = np.where(rng.random(m) < 0.5, 1, 2)
    means = np.where((labels == 1)[:, None], model.mu1, model.mu2)
    w = _draw(model, means, rng)
    return x, y, TestBatch(w, labels)


def oracle_score(w, model: TwoClassGaussianModel):
    """Optimal discriminant ``(w - mu)' Sigma^{-1} d``; positive favours class 1.

    Accepts a single point of shape (p,) or a batch of shape (m, p).
    """
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != model.p:
        raise ValueError(f"point dimension {w.shape[-1]} != model dimension {model.p}")
    s = (w - model.center) @ (model.precision @ model.d)
    return float(s) if np.ndim(s) == 0 else s


def oracle_posterior(w, model: TwoClassGaussianModel):
    """True class-1 posterior ``P(theta = 1 | w)``."""
    return logistic(oracle_score(w, model))


def oracle_risk(model: TwoClassGaussianModel) -> float:
    """Bayes risk ``1 - Phi(sqrt(Delta) / 2)`` of the Fisher rule."""
    return 0.5 * math.erfc(0.5 * math.sqrt(max(model.delta_sq, 0.0)) / math.sqrt(2.0))
