"""
Coordinate-wise shrinkage of a sparse mean difference
=====================================================

Five training points per class, 625 coordinates, 50 of which carry a
shift of 2.5. The raw difference of sample means is noisy everywhere; the
shrunken difference keeps the signal and flattens the rest.
"""

import numpy as np

from lass import TwoClassGaussianModel, fit_shrinkage, sample_dataset

p = 625
mu1 = np.zeros(p)
mu1[:50] = 2.5
model = TwoClassGaussianModel(mu1, np.zeros(p), 0.5 * np.eye(p))

x, y, _ = sample_dataset(model, 5, 5, 1, seed=1)
est = fit_shrinkage(x, y, b=0.0)

# %%
# Compare the raw and shrunken differences on signal and null coordinates.
signal, null = slice(0, 50), slice(50, None)
print(f"{'':>10} {'raw':>8} {'shrunk':>8}")
for name, idx in (("signal", signal), ("null", null)):
    print(f"{name:>10} {np.abs(est.raw_diff[idx]).mean():8.3f} {np.abs(est.d_hat[idx]).mean():8.3f}")

# %%
# The factor q behaves like a smooth hard threshold.
print("\nq quantiles on null coordinates:", np.quantile(est.q[null], [0.5, 0.9, 0.99]).round(4))
print("q quantiles on signal coordinates:", np.quantile(est.q[signal], [0.01, 0.1, 0.5]).round(4))

# %%
# Squared-error loss of the two estimates of d.
d = model.d
print(f"\n||raw - d||^2 = {((est.raw_diff - d) ** 2).sum():.1f}")
print(f"||shrunk - d||^2 = {((est.d_hat - d) ** 2).sum():.1f}")
