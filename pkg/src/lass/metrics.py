"""Realized (single-replication) error and power metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .selection import DecisionVector

__all__ = ["SelectionReport", "evaluate", "GapResult", "fsr_mfsr_gap"]


@dataclass(frozen=True)
class SelectionReport:
    """Counts and rates for one set of decisions against the true labels.

    Every ratio uses the ``max(denominator, 1)`` guard, so a class that is
    never selected has FSR 0. ``misclassification_rate`` counts errors over
    all ``m`` points; ``misclassification_rate_selected`` over the
    definitive decisions only (equal to ``fsr_global``).
    """

    m: int
    n_selected1: int
    n_selected2: int
    n_errors1: int
    n_errors2: int
    ecc: int
    fsr_class1: float
    fsr_class2: float
    fsr_global: float
    power: float
    indecision_fraction: float
    misclassification_rate: float
    misclassification_rate_selected: float
    mfsr_est1: float = float("nan")
    mfsr_est2: float = float("nan")

    @property
    def n_errors(self) -> int:
        return self.n_errors1 + self.n_errors2

    @property
    def n_indecisions(self) -> int:
        return self.m - self.n_selected1 - self.n_selected2

    def as_dict(self) -> dict:
        return asdict(self)


def evaluate(decisions, labels) -> SelectionReport:
    """Score decisions (a :class:`DecisionVector` or action array) against labels."""
    if isinstance(decisions, DecisionVector):
        actions = decisions.actions
        est1, est2 = decisions.est_mfsr1, decisions.est_mfsr2
    else:
        actions = decisions
        est1 = est2 = float("nan")
    actions = np.asarray(actions).ravel()
    labels = np.asarray(labels).ravel()
    if actions.size != labels.size:
        raise ValueError(f"{actions.size} decisions for {labels.size} labels")
    if not np.isin(labels, (1, 2)).all():
        bad = labels[~np.isin(labels, (1, 2))][0]
        raise ValueError(f"invalid label {bad!r}; labels must be 1 or 2")
    if not np.isin(actions, (0, 1, 2)).all():
        raise ValueError("actions must be 0, 1 or 2")
    m = actions.size
    sel1 = actions == 1
    sel2 = actions == 2
    n1, n2 = int(sel1.sum()), int(sel2.sum())
    e1 = int((sel1 & (labels != 1)).sum())
    e2 = int((sel2 & (labels != 2)).sum())
    ecc = n1 + n2 - e1 - e2
    fsr = (e1 + e2) / max(n1 + n2, 1)
    return SelectionReport(
        m=m,
        n_selected1=n1,
        n_selected2=n2,
        n_errors1=e1,
        n_errors2=e2,
        ecc=ecc,
        fsr_class1=e1 / max(n1, 1),
        fsr_class2=e2 / max(n2, 1),
        fsr_global=fsr,
        power=ecc / m if m else 0.0,
        indecision_fraction=(m - n1 - n2) / m if m else 0.0,
        misclassification_rate=(e1 + e2) / m if m else 0.0,
        misclassification_rate_selected=fsr,
        mfsr_est1=est1,
        mfsr_est2=est2,
    )


@dataclass(frozen=True)
class GapResult:
    """Mean of ratios (``fsr``) vs ratio of means (``mfsr``).

    ``mfsr`` and ``gap`` are NaN when no replication selected anything;
    ``n_empty`` counts replications with a zero denominator.
    """

    fsr: float
    mfsr: float
    gap: float
    n_empty: int


def fsr_mfsr_gap(numerators, denominators) -> GapResult:
    """Compare the FSR and marginal FSR estimates across replications.

    Parameters
    ----------
    numerators : array-like of int
        Wrong selections per replication.
    denominators : array-like of int
        Total selections per replication.
    """
    num = np.asarray(numerators, dtype=float).ravel()
    den = np.asarray(denominators, dtype=float).ravel()
    if num.size != den.size:
        raise ValueError("numerators and denominators differ in length")
    if num.size < 1:
        raise ValueError("need at least one replication")
    if (num > den).any() or (num < 0).any():
        raise ValueError("need 0 <= numerator <= denominator")
    n_empty = int((den == 0).sum())
    fsr = float(np.mean(num / np.maximum(den, 1)))
    total = den.sum()
    if total == 0:
        return GapResult(fsr, float("nan"), float("nan"), n_empty)
    mfsr = float(num.sum() / total)
    return GapResult(fsr, mfsr, abs(fsr - mfsr), n_empty)
