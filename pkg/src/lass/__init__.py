"""Locally adaptive shrinkage and selection (LASS) for two-class Gaussian data.

Selective classification with an indecision option: a shrunken linear
discriminant score is turned into class-1 probabilities, and a step-wise
dual-threshold rule keeps the class-specific false selection rate near a
target level.
"""

__version__ = "0.1.0"

from .metrics import GapResult, SelectionReport, evaluate, fsr_mfsr_gap
from .model import (
    TestBatch,
    TwoClassGaussianModel,
    oracle_posterior,
    oracle_risk,
    oracle_score,
    sample_dataset,
)
from .precision import PrecisionMethod, estimate_precision
from .scoring import ScoreBatch, TrainedLDA, fit, fit_naive, score_batch
from .selection import (
    DecisionVector,
    FsrLevels,
    apply_rule,
    brute_force_select,
    classify_all,
    oracle_select,
    select,
    stepwise_cutoffs,
)
from .shrinkage import ShrinkageConfig, ShrinkageEstimate, fit_shrinkage, pooled_variance, shrink_factor
from .simharness import ExperimentConfig, condition_check, gen_means, gen_precision, run_experiment
