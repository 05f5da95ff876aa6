"""
A small replicated simulation
=============================

Compares the Fisher rule with true parameters, a plug-in rule with raw
sample means and a pseudo-inverse covariance, and the shrinkage rule, on
the three precision models. Sizes are reduced so the script runs in about
a minute; ``lass simulate`` runs the full-sized grid.
"""

from lass import ExperimentConfig, FsrLevels, oracle_risk, run_experiment
from lass.simharness import build_model

for levels, label in ((None, "conventional"), (FsrLevels(0.1, 0.1), "alpha = 0.1")):
    print(f"\n== {label} ==")
    print(f"{'model':>6} {'method':>7} {'misclass':>9} {'fsr':>7} {'indecision':>11}")
    for model_id in ("band", "ar1", "block"):
        cfg = ExperimentConfig(model_id=model_id, p=200, n1=200, n2=200, m=1000, levels=levels, replications=20)
        res = run_experiment(cfg)
        for method in ("oracle", "naive", "lass"):
            print(
                f"{model_id:>6} {method:>7} {res.mean(method, 'misclass'):9.4f} {res.mean(method, 'fsr'):7.4f}"
                f" {res.mean(method, 'indecision_frac'):11.4f}"
            )
        if levels is None:
            print(f"{'':>6} {'bayes':>7} {oracle_risk(build_model(cfg)):9.4f}")
