"""Plug-in discriminant scores and class-1 posterior probabilities.

Orientation: the score is positive when a point looks like class 1, and
``t_hat`` estimates ``P(class 1 | w)``. Class 2 is therefore selected for
*small* ``t_hat``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import TestBatch, TwoClassGaussianModel, logistic, oracle_posterior, oracle_score
from .precision import PrecisionMethod, estimate_precision
from .shrinkage import ShrinkageEstimate, fit_shrinkage

__all__ = ["TrainedLDA", "ScoreBatch", "fit", "fit_naive", "score_batch", "oracle_scores", "oracle_posterior"]


@dataclass(frozen=True)
class TrainedLDA:
    xbar: np.ndarray
    ybar: np.ndarray
    center: np.ndarray
    d_hat: np.ndarray
    precision_hat: np.ndarray
    direction: np.ndarray
    shrink: ShrinkageEstimate | None = None

    @property
    def p(self) -> int:
        return self.xbar.size


@dataclass(frozen=True)
class ScoreBatch:
    s_hat: np.ndarray
    t_hat: np.ndarray


def _assemble(x, y, d_hat, precision_hat, shrink=None) -> TrainedLDA:
    xbar = x.mean(axis=0)
    ybar = y.mean(axis=0)
    return TrainedLDA(
        xbar=xbar,
        ybar=ybar,
        center=(xbar + ybar) / 2,
        d_hat=d_hat,
        precision_hat=precision_hat,
        direction=precision_hat @ d_hat,
        shrink=shrink,
    )


def fit(x, y, b: float = 0.1, method: PrecisionMethod | str = "ridge:1.0", true_precision=None) -> TrainedLDA:
    """Fit the shrunken LDA rule on class-1 sample ``x`` and class-2 sample ``y``."""
    if isinstance(method, str):
        method = PrecisionMethod.parse(method)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    if x.shape[1] != y.shape[1]:
        raise ValueError(f"feature dimensions differ: {x.shape[1]} vs {y.shape[1]}")
    shrink = fit_shrinkage(x, y, b)
    prec = estimate_precision(method, x, y, true_precision)
    return _assemble(x, y, shrink.d_hat, prec, shrink)


def fit_naive(x, y) -> TrainedLDA:
    """Unshrunken baseline: raw mean difference and the pseudo-inverse of the
    pooled sample covariance."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    prec = estimate_precision(PrecisionMethod("pinv"), x, y)
    return _assemble(x, y, x.mean(axis=0) - y.mean(axis=0), prec)


def score_batch(model_fit: TrainedLDA, batch) -> ScoreBatch:
    """Scores ``(w - center)' direction`` and their logistic transforms.

    ``batch`` may be a :class:`TestBatch` or a plain ``(m, p)`` array.
    """
    pts = batch.points if isinstance(batch, TestBatch) else np.atleast_2d(np.asarray(batch, dtype=float))
    if pts.shape[1] != model_fit.p:
        raise ValueError(f"test points have {pts.shape[1]} features, model has {model_fit.p}")
    s = (pts - model_fit.center) @ model_fit.direction
    return ScoreBatch(s, np.atleast_1d(logistic(s)))


def oracle_scores(batch, model: TwoClassGaussianModel) -> ScoreBatch:
    """Score a batch with the true parameters."""
    pts = batch.points if isinstance(batch, TestBatch) else np.atleast_2d(np.asarray(batch, dtype=float))
    s = np.atleast_1d(oracle_score(pts, model))
    return ScoreBatch(s, np.atleast_1d(logistic(s)))
