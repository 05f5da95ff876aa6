"""Pluggable estimators of the precision matrix used in the plug-in score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["PrecisionMethod", "pooled_covariance", "estimate_precision"]

_KINDS = ("oracle", "identity", "diagonal", "pinv", "ridge")


@dataclass(frozen=True)
class PrecisionMethod:
    """One of ``oracle``, ``identity``, ``diagonal``, ``pinv`` or ``ridge``.

    ``lam`` is the ridge penalty and must be positive for ``ridge``.
    """

    kind: str
    lam: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown precision method {self.kind!r}; expected one of {_KINDS}")
        if self.kind == "ridge":
            if self.lam is None or not self.lam > 0:
                raise ValueError("ridge requires a positive lambda")
        elif self.lam is not None:
            raise ValueError(f"{self.kind} takes no parameter")

    @classmethod
    def parse(cls, text: str) -> "PrecisionMethod":
        """Parse the command-line form, e.g. ``"pinv"`` or ``"ridge:0.5"``."""
        kind, _, arg = text.strip().lower().partition(":")
        if kind == "ridge":
            try:
                lam = float(arg)
            except ValueError:
                raise ValueError(f"bad ridge parameter in {text!r}; use ridge:<lambda>") from None
            return cls("ridge", lam)
        if arg:
            raise ValueError(f"{kind} takes no parameter: {text!r}")
        return cls(kind)

    def __str__(self):
        return f"ridge:{self.lam!r}" if self.kind == "ridge" else self.kind


def pooled_covariance(x, y) -> np.ndarray:
    """Within-class scatter of both samples divided by ``n1 + n2 - 2``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    dof = x.shape[0] + y.shape[0] - 2
    if dof < 1:
        raise ValueError("insufficient degrees of freedom")
    xc = x - x.mean(axis=0)
    yc = y - y.mean(axis=0)
    cov = (xc.T @ xc + yc.T @ yc) / dof
    return 0.5 * (cov + cov.T)


def _sym(a):
    return 0.5 * (a + a.T)


def estimate_precision(method: PrecisionMethod, x, y, true_precision=None) -> np.ndarray:
    """Estimate ``Sigma^{-1}`` from two training samples.

    Parameters
    ----------
    method : PrecisionMethod
    x, y : arrays of shape (n1, p) and (n2, p)
    true_precision : array of shape (p, p), optional
        Required by the ``oracle`` method, ignored otherwise.

    Returns
    -------
    array of shape (p, p), symmetric.
    """
    p = np.shape(x)[-1]
    kind = method.kind
    if kind == "oracle":
        if true_precision is None:
            raise ValueError("oracle precision requested but no true precision supplied")
        prec = np.asarray(true_precision, dtype=float)
        if prec.shape != (p, p):
            raise ValueError(f"true precision has shape {prec.shape}, expected {(p, p)}")
        return _sym(prec)
    if kind == "identity":
        return np.eye(p)
    if kind == "diagonal":
        from .shrinkage import pooled_variance

        var = pooled_variance(x, y)
        bad = np.flatnonzero(var <= 0)
        if bad.size:
            raise ValueError(f"degenerate coordinate: zero pooled variance at index {bad[0]}")
        return np.diag(1.0 / var)
    cov = pooled_covariance(x, y)
    if kind == "pinv":
        n = np.shape(x)[0] + np.shape(y)[0]
        u, s, vt = np.linalg.svd(cov, hermitian=True)
        # hermitian SVD returns |eigenvalues|, already sorted descending
        cutoff = max(p, n) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        inv = np.where(s > cutoff, 1.0 / np.where(s > cutoff, s, 1.0), 0.0)
        return _sym((vt.T * inv) @ u.T)
    # ridge
    return _sym(np.linalg.inv(cov + method.lam * np.eye(p)))
