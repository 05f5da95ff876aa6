"""
Classification with a false selection rate budget
=================================================

Posterior class probabilities are turned into three-way decisions:
class 1, class 2, or no decision. The step-wise rule admits the most
confident points of each class while the running mean of their error
probabilities stays below the target.
"""

import numpy as np

from lass import FsrLevels, TwoClassGaussianModel, evaluate, oracle_posterior, sample_dataset, select

model = TwoClassGaussianModel(np.zeros(5), np.array([1.5, 0, 0, 0, 0]), np.eye(5))
_, _, batch = sample_dataset(model, 2, 2, 2000, seed=3)
t = oracle_posterior(batch.points, model)

# %%
# A small hand-worked example first.
toy = np.array([0.05, 0.08, 0.20, 0.60])
dv = select(toy, FsrLevels(0.1, 0.1))
print("toy posteriors", toy, "-> actions", dv.actions, "k2 =", dv.k2)

# %%
# Sweep the target level. Tighter budgets buy accuracy with indecisions.
print(f"\n{'alpha':>6} {'fsr1':>7} {'fsr2':>7} {'indecision':>11} {'power':>7}")
for alpha in (0.02, 0.05, 0.1, 0.2, 0.5):
    r = evaluate(select(t, FsrLevels(alpha, alpha)), batch.true_labels)
    print(f"{alpha:6.2f} {r.fsr_class1:7.3f} {r.fsr_class2:7.3f} {r.indecision_fraction:11.3f} {r.power:7.3f}")
