"""Feature screening for wide data: variance filter then top-K two-sample t-statistics."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .shrinkage import pooled_variance

__all__ = ["t_statistics", "PreprocessResult", "preprocess"]


def t_statistics(x, y) -> np.ndarray:
    """Pooled two-sample t-statistic ``(xbar - ybar) / sqrt(s (1/n1 + 1/n2))`` per column."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    var = pooled_variance(x, y)
    se = np.sqrt(var * (1.0 / x.shape[0] + 1.0 / y.shape[0]))
    diff = x.mean(axis=0) - y.mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, diff / se, 0.0)
    return t


@dataclass(frozen=True)
class PreprocessResult:
    """Indices of kept columns (in rank order) with the statistics behind them."""

    kept: np.ndarray
    variance: np.ndarray
    t_stat: np.ndarray
    n_dropped_variance: int


def preprocess(values, labels, var_low=1e-2, var_high=1e2, rescale=1.0, top_k=200) -> PreprocessResult:
    """Screen columns of a labelled training matrix.

    Values are multiplied by ``rescale``; columns whose sample variance falls
    outside ``[var_low, var_high]`` are dropped; of the rest, the ``top_k``
    with the largest ``|t|`` are kept, ties broken by column order. If fewer
    than ``top_k`` survive, all are kept with a warning.
    """
    values = np.asarray(values, dtype=float) * rescale
    labels = np.asarray(labels)
    var = values.var(axis=0, ddof=1)
    ok = (var >= var_low) & (var <= var_high)
    idx = np.flatnonzero(ok)
    t = t_statistics(values[labels == 1], values[labels == 2])
    if top_k > idx.size:
        warnings.warn(f"top_k={top_k} exceeds the {idx.size} features left after the variance filter; keeping all")
        top_k = idx.size
    order = idx[np.argsort(-np.abs(t[idx]), kind="stable")]
    return PreprocessResult(order[:top_k], var, t, int((~ok).sum()))
