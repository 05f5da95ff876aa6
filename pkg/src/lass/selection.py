"""Step-wise dual-threshold selection with an indecision option.

Input is a vector of class-1 probabilities ``T``. Class 2 takes the points
with the smallest ``T`` while the running mean of the ordered ``T`` (an
estimate of the class-2 false selection rate) stays at or below ``alpha2``.
Class 1 is symmetric on ``1 - T`` from the top. Both thresholds are capped
at 0.5, so no point can be sent to both classes.

Actions are coded ``0`` (indecision), ``1`` and ``2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "INDECISION",
    "FsrLevels",
    "DecisionVector",
    "stepwise_cutoffs",
    "apply_rule",
    "select",
    "oracle_select",
    "classify_all",
    "brute_force_select",
]

INDECISION = 0
_CAP = 0.5


@dataclass(frozen=True)
class FsrLevels:
    """Target class-specific false selection rates, each in (0, 0.5].

    ``alpha1 = alpha2 = 0.5`` disables indecisions.
    """

    alpha1: float = 0.1
    alpha2: float = 0.1

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            a = getattr(self, name)
            if not 0.0 < a <= 0.5:
                raise ValueError(f"{name} must lie in (0, 0.5], got {a!r}")


@dataclass(frozen=True)
class DecisionVector:
    """Per-point actions plus the realized thresholds.

    ``threshold1`` is the cut on ``1 - T`` (class 1 iff ``1 - T < threshold1``),
    ``threshold2`` the cut on ``T`` (class 2 iff ``T <= threshold2``). A
    threshold is ``None`` when its class is never assigned. ``est_mfsr1`` and
    ``est_mfsr2`` are the running-mean error estimates at the chosen cutoffs.
    """

    actions: np.ndarray
    threshold1: float | None
    threshold2: float | None
    k1: int | None = None
    k2: int | None = None
    est_mfsr1: float = float("nan")
    est_mfsr2: float = float("nan")

    @property
    def m(self) -> int:
        return self.actions.size

    def __eq__(self, other):
        if not isinstance(other, DecisionVector):
            return NotImplemented
        return (
            np.array_equal(self.actions, other.actions)
            and self.threshold1 == other.threshold1
            and self.threshold2 == other.threshold2
            and self.k1 == other.k1
            and self.k2 == other.k2
        )

    __hash__ = None


def _check_t(t_values) -> np.ndarray:
    t = np.asarray(t_values, dtype=float).ravel()
    if t.size and not ((t > 0) & (t < 1)).all():
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    return t


def stepwise_cutoffs(t_values, levels: FsrLevels) -> tuple[int | None, int | None]:
    """Return ``(k1, k2)`` from the running means of the ordered probabilities.

    ``k2`` is the largest ``j`` with ``mean(T(1..j)) <= alpha2`` over the
    ascending order statistics. ``k1`` is the largest ``j <= m - 1`` whose
    top ``j + 1`` values satisfy ``mean(1 - T) <= alpha1``. Either is
    ``None`` when no ``j`` qualifies.
    """
    t = _check_t(t_values)
    m = t.size
    if m == 0:
        return None, None
    ts = np.sort(t, kind="stable")

    # sum(T - a) <= 0 rather than mean(T) <= a: exact when every T equals a
    ok2 = np.cumsum(ts - levels.alpha2) <= 0
    k2 = int(np.flatnonzero(ok2)[-1]) + 1 if ok2.any() else None

    k1 = None
    if m >= 2:
        top = 1.0 - ts[::-1]
        ok1 = np.cumsum(top - levels.alpha1)[1:] <= 0  # entry j-1 <-> j+1 values
        if ok1.any():
            k1 = int(np.flatnonzero(ok1)[-1]) + 1
    return k1, k2


def apply_rule(t_values, k1: int | None, k2: int | None) -> DecisionVector:
    """Turn cutoffs into actions.

    Class 2 iff ``T <= min(T(k2), 0.5)``; class 1 iff
    ``1 - T < min(1 - T(m - k1), 0.5)``, with order statistics 1-indexed.
    """
    t = _check_t(t_values)
    m = t.size
    ts = np.sort(t, kind="stable")
    actions = np.zeros(m, dtype=np.int8)
    thr1 = thr2 = None
    est1 = est2 = float("nan")
    if k2 is not None:
        thr2 = min(float(ts[k2 - 1]), _CAP)
        actions[t <= thr2] = 2
        est2 = float(ts[:k2].mean())
    if k1 is not None:
        thr1 = min(1.0 - float(ts[m - k1 - 1]), _CAP)
        sel1 = (1.0 - t) < thr1
        assert not (sel1 & (actions == 2)).any(), "overlapping selections despite 0.5 caps"
        actions[sel1] = 1
        est1 = float((1.0 - ts[m - k1 - 1 :]).mean())
    return DecisionVector(actions, thr1, thr2, k1, k2, est1, est2)


def select(t_values, levels: FsrLevels) -> DecisionVector:
    """Cutoffs and rule in one step."""
    k1, k2 = stepwise_cutoffs(t_values, levels)
    return apply_rule(t_values, k1, k2)


def oracle_select(t_true, levels: FsrLevels) -> DecisionVector:
    """The step-wise rule applied to the true posteriors."""
    return select(t_true, levels)


def classify_all(t_values) -> DecisionVector:
    """No-indecision rule: class 1 iff ``T > 0.5``, else class 2."""
    t = _check_t(t_values)
    actions = np.where(t > 0.5, 1, 2).astype(np.int8)
    return DecisionVector(actions, _CAP, _CAP)


def brute_force_select(t_values, levels: FsrLevels, max_m: int = 20) -> DecisionVector:
    """Exhaustive reference for :func:`select` on small inputs.

    Every candidate order-statistic threshold is checked against the literal
    running-mean constraint in exact rational arithmetic, and the largest
    admissible selection per class is kept.
    """
    t = [float(v) for v in np.asarray(t_values, dtype=float).ravel()]
    m = len(t)
    if m > max_m:
        raise ValueError(f"brute force limited to m <= {max_m}, got {m}")
    if any(not 0 < v < 1 for v in t):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    order = sorted(range(m), key=lambda i: (t[i], i))
    ts = [Fraction(t[i]) for i in order]
    a1, a2 = Fraction(levels.alpha1), Fraction(levels.alpha2)
    half = Fraction(1, 2)

    k2 = None
    for j in range(1, m + 1):
        if sum(ts[:j]) / j <= a2:
            if k2 is None or j > k2:
                k2 = j
    k1 = None
    for j in range(1, m):
        top = [1 - ts[m - 1 - i] for i in range(j + 1)]
        if sum(top) / (j + 1) <= a1:
            if k1 is None or j > k1:
                k1 = j

    actions = [0] * m
    thr1 = thr2 = None
    if k2 is not None:
        cut = min(ts[k2 - 1], half)
        thr2 = float(cut)
        for i in range(m):
            if Fraction(t[i]) <= cut:
                actions[i] = 2
    if k1 is not None:
        cut = min(1 - ts[m - k1 - 1], half)
        thr1 = float(cut)
        for i in range(m):
            if 1 - Fraction(t[i]) < cut:
                if actions[i] == 2:
                    raise AssertionError("overlapping selections")
                actions[i] = 1
    return DecisionVector(np.array(actions, dtype=np.int8), thr1, thr2, k1, k2)
