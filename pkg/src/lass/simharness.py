"""Replicated simulation experiments: band, AR(1) and block precision models
with sparse or dense mean shifts, compared across LASS and two baselines.

Methods
-------
``oracle``
    True means and precision (the Fisher rule / true posteriors).
``naive``
    Sample means with the pseudo-inverse of the pooled sample covariance.
``lass``
    Shrunken mean difference with the configured precision estimator.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .metrics import SelectionReport, evaluate
from .model import TwoClassGaussianModel, make_rng, sample_dataset
from .precision import PrecisionMethod
from .scoring import fit, fit_naive, oracle_scores, score_batch
from .selection import FsrLevels, classify_all, select
from .shrinkage import BOUNDARY, G1, G2, G3, ShrinkageConfig, classify_signal_groups

__all__ = [
    "MODELS",
    "METHODS",
    "REP_COLUMNS",
    "ExperimentConfig",
    "ExperimentResult",
    "ConditionReport",
    "gen_precision",
    "gen_means",
    "build_model",
    "run_replication",
    "run_experiment",
    "condition_check",
    "default_workers",
]

MODELS = ("band", "ar1", "block")
METHODS = ("oracle", "naive", "lass")
REP_COLUMNS = ("rep", "method", "fsr1", "fsr2", "fsr", "ecc", "power", "indecision_frac", "misclass")
METRICS = REP_COLUMNS[2:]

# stream ids for make_rng
_STREAM_PRECISION = 0
_STREAM_REPLICATION = 1


def gen_precision(model_id: str, p: int, seed: int = 0) -> np.ndarray:
    """Precision matrix of a simulation model.

    ``band``: 1 on the diagonal, 0.35 and 0.175 on the first two off-diagonals.
    ``ar1``: ``0.3 ** |i - j|``.
    ``block``: ``(B + delta I) / (1 + delta)`` where ``B`` has unit diagonal,
    0.05 * Bernoulli(0.1) entries in the rows of the first half, 0.05 in the
    trailing block, and ``delta = max(-lambda_min(B), 0) + 0.1``. The Bernoulli
    pattern depends on ``seed`` only.
    """
    if p < 3:
        raise ValueError("p must be >= 3")
    model_id = model_id.lower()
    if model_id == "band":
        omega = np.eye(p)
        i = np.arange(p - 1)
        omega[i, i + 1] = omega[i + 1, i] = 0.35
        i = np.arange(p - 2)
        omega[i, i + 2] = omega[i + 2, i] = 0.175
    elif model_id == "ar1":
        idx = np.arange(p)
        omega = 0.3 ** np.abs(idx[:, None] - idx[None, :])
    elif model_id == "block":
        rng = make_rng(seed, _STREAM_PRECISION)
        half = p // 2
        upper = np.zeros((p, p))
        coin = rng.random((half, p)) < 0.1
        upper[:half] = 0.05 * coin
        upper[half:, :] = 0.05
        upper = np.triu(upper, k=1)
        b = upper + upper.T + np.eye(p)
        lam_min = np.linalg.eigvalsh(b)[0]
        delta = max(-lam_min, 0.0) + 0.1
        omega = (b + delta * np.eye(p)) / (1.0 + delta)
    else:
        raise ValueError(f"unknown model {model_id!r}; expected one of {MODELS}")
    assert np.linalg.eigvalsh(omega)[0] > 0, "precision matrix is not positive definite"
    return omega


def gen_means(mean_setting, p: int, n: int):
    """Class means ``(mu1, mu2)``; ``mu1`` is zero for the built-in settings.

    ``"sparse"``: ten entries of 0.5, ten of ``0.1 sqrt(log p / n)``, rest 0.
    ``"dense"``: the first ``p // 4`` entries are 0.4.
    An array is taken as ``mu2``; a pair ``(mu1, mu2)`` passes through.
    """
    if isinstance(mean_setting, str):
        setting = mean_setting.lower()
        mu1 = np.zeros(p)
        mu2 = np.zeros(p)
        if setting == "sparse":
            if p < 20:
                raise ValueError("the sparse setting needs p >= 20")
            mu2[:10] = 0.5
            mu2[10:20] = 0.1 * math.sqrt(math.log(p) / n)
        elif setting == "dense":
            mu2[: p // 4] = 0.4
        else:
            raise ValueError(f"unknown mean setting {mean_setting!r}")
        return mu1, mu2
    if isinstance(mean_setting, tuple) and len(mean_setting) == 2:
        mu1, mu2 = (np.asarray(v, dtype=float) for v in mean_setting)
    else:
        mu2 = np.asarray(mean_setting, dtype=float)
        mu1 = np.zeros_like(mu2)
    if mu1.shape != (p,) or mu2.shape != (p,):
        raise ValueError(f"custom means must have length {p}")
    return mu1, mu2


@dataclass(frozen=True)
class ExperimentConfig:
    """One cell of a simulation grid.

    ``levels=None`` is the conventional mode: every point is classified by the
    sign of its score and no indecisions are made.
    """

    model_id: str = "band"
    p: int = 500
    n1: int = 400
    n2: int = 400
    m: int = 2000
    mean_setting: object = "sparse"
    levels: FsrLevels | None = field(default_factory=FsrLevels)
    precision: PrecisionMethod = field(default_factory=lambda: PrecisionMethod("oracle"))
    b: float = 0.1
    replications: int = 100
    seed: int = 0
    methods: tuple = METHODS

    def __post_init__(self):
        if self.model_id not in MODELS:
            raise ValueError(f"unknown model {self.model_id!r}")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if self.p < 3:
            raise ValueError("p must be >= 3")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if isinstance(self.precision, str):
            object.__setattr__(self, "precision", PrecisionMethod.parse(self.precision))


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: list
    summary: list
    failures: list

    def column(self, method: str, metric: str) -> np.ndarray:
        return np.array([r[metric] for r in self.rows if r["method"] == method], dtype=float)

    def mean(self, method: str, metric: str) -> float:
        for row in self.summary:
            if row["method"] == method and row["metric"] == metric:
                return row["mean"]
        raise KeyError((method, metric))

    def se(self, method: str, metric: str) -> float:
        for row in self.summary:
            if row["method"] == method and row["metric"] == metric:
                return row["se"]
        raise KeyError((method, metric))


def _mean_key(setting):
    if isinstance(setting, str):
        return setting
    return None


@lru_cache(maxsize=16)
def _cached_model(model_id: str, p: int, mean_key: str, n: int, seed: int) -> TwoClassGaussianModel:
    omega = gen_precision(model_id, p, seed)
    mu1, mu2 = gen_means(mean_key, p, n)
    return TwoClassGaussianModel.from_precision(mu1, mu2, omega)


def build_model(config: ExperimentConfig) -> TwoClassGaussianModel:
    """Ground-truth model for a config; ``Sigma`` is the dense inverse of ``Omega``."""
    key = _mean_key(config.mean_setting)
    if key is not None:
        return _cached_model(config.model_id, config.p, key, config.n1, config.seed)
    omega = gen_precision(config.model_id, config.p, config.seed)
    mu1, mu2 = gen_means(config.mean_setting, config.p, config.n1)
    return TwoClassGaussianModel.from_precision(mu1, mu2, omega)


def _decide(t, levels):
    return classify_all(t) if levels is None else select(t, levels)


def run_replication(config: ExperimentConfig, model: TwoClassGaussianModel, rep: int) -> dict:
    """One replication; returns ``{method: SelectionReport}``."""
    rng = make_rng(config.seed, _STREAM_REPLICATION, rep)
    x, y, batch = sample_dataset(model, config.n1, config.n2, config.m, rng)
    out = {}
    for method in config.methods:
        if method == "oracle":
            t = oracle_scores(batch, model).t_hat
        elif method == "naive":
            t = score_batch(fit_naive(x, y), batch).t_hat
        else:
            trained = fit(x, y, b=config.b, method=config.precision, true_precision=model.precision)
            t = score_batch(trained, batch).t_hat
        out[method] = evaluate(_decide(t, config.levels), batch.true_labels)
    return out


def _row(rep: int, method: str, r: SelectionReport) -> dict:
    return {
        "rep": rep,
        "method": method,
        "fsr1": r.fsr_class1,
        "fsr2": r.fsr_class2,
        "fsr": r.fsr_global,
        "ecc": r.ecc,
        "power": r.power,
        "indecision_frac": r.indecision_fraction,
        "misclass": r.misclassification_rate,
    }


def default_workers() -> int:
    """Worker cap from ``LASS_THREADS``, else the CPU count."""
    env = os.environ.get("LASS_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ValueError(f"LASS_THREADS must be a positive integer, got {env!r}") from None
        if n < 1:
            raise ValueError(f"LASS_THREADS must be a positive integer, got {env!r}")
        return n
    return os.cpu_count() or 1


def summarize(rows, methods=METHODS) -> list:
    """Mean and standard error of each metric per method, in a fixed order."""
    out = []
    for method in methods:
        sub = [r for r in rows if r["method"] == method]
        if not sub:
            continue
        for metric in METRICS:
            v = np.array([r[metric] for r in sub], dtype=float)
            se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
            out.append({"method": method, "metric": metric, "mean": float(v.mean()), "se": se})
    return out


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ExperimentResult:
    """Run all replications and aggregate.

    Each replication draws from its own stream keyed by ``(seed, rep)`` and
    results are collected in replication order, so the output does not depend
    on ``workers``. A failing replication is recorded in ``failures`` and
    left out of the summary.
    """
    model = build_model(config)
    workers = default_workers() if workers is None else max(1, int(workers))

    def job(rep):
        try:
            return rep, run_replication(config, model, rep), None
        except Exception as exc:  # recorded, not fatal
            return rep, None, f"{type(exc).__name__}: {exc}"

    reps = range(config.replications)
    if workers == 1:
        results = [job(r) for r in reps]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, reps))

    rows, failures = [], []
    for rep, reports, err in results:
        if err is not None:
            failures.append({"rep": rep, "error": err})
            continue
        for method in config.methods:
            rows.append(_row(rep, method, reports[method]))
    return ExperimentResult(config, rows, summarize(rows, config.methods), failures)


@dataclass(frozen=True)
class ConditionReport:
    """Whether a ground-truth model meets the working hypotheses of the method."""

    eps0_bound: float
    n_strong: int
    n_moderate: int
    n_weak: int
    n_boundary: int
    moderate_bound: float
    tail_energy: float

    @property
    def has_strong_signal(self) -> bool:
        return self.n_strong >= 1

    @property
    def moderate_sparse(self) -> bool:
        return self.n_moderate <= self.moderate_bound


def condition_check(
    model: TwoClassGaussianModel, n1: int, n2: int, b: float = 0.1, epsilon: float = 0.05, weak: float = 0.1
) -> ConditionReport:
    """Summarize the diagonal bound, signal group sizes and the energy of the
    non-strong coordinates of ``d`` for a model and sample sizes."""
    diag = np.diag(model.sigma)
    cfg = ShrinkageConfig(n1, n2, model.p, b)
    groups = classify_signal_groups(model.d, diag, cfg, epsilon, weak)
    d = model.d
    return ConditionReport(
        eps0_bound=float(min(diag.min(), 1.0 / diag.max())),
        n_strong=int((groups == G1).sum()),
        n_moderate=int((groups == G3).sum()),
        n_weak=int((groups == G2).sum()),
        n_boundary=int((groups == BOUNDARY).sum()),
        moderate_bound=n1 * n2 / (n1 + n2),
        tail_energy=float((d[groups != G1] ** 2).sum()),
    )
