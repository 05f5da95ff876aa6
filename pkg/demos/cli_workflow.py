"""
The command-line workflow on a synthetic expression table
=========================================================

Writes a wide labelled training table and an unlabelled test table, screens
features, classifies at a 10% FSR budget, and prints the decision counts.
Run from any directory; outputs go to a temporary folder.
"""

import tempfile
from pathlib import Path

import numpy as np

from lass.cli import main, read_decisions
from lass.csvio import write_rows

rng = np.random.default_rng(0)
p, n = 2000, 40
names = [f"gene{j}" for j in range(p)]
shift = np.zeros(p)
shift[:30] = 0.7


def table(path, n_per_class, with_label):
    labels = np.repeat([1, 2], n_per_class)
    vals = rng.normal(size=(labels.size, p)) + shift * (labels == 1)[:, None]
    cols = ["id"] + (["label"] if with_label else []) + names
    rows = []
    for i, (v, lab) in enumerate(zip(vals, labels)):
        row = dict(zip(names, v), id=f"s{i}")
        if with_label:
            row["label"] = int(lab)
        rows.append(row)
    write_rows(path, cols, rows)
    return labels


work = Path(tempfile.mkdtemp(prefix="lass-demo-"))
table(work / "train.csv", n, True)
truth = table(work / "test.csv", 100, False)

# %%
# Keep the 50 features with the largest two-sample t-statistics.
main(["preprocess", str(work / "train.csv"), "--test", str(work / "test.csv"), "--top-k", "50", "--out", str(work / "pp")])

# %%
# Classify at alpha = 0.1 with a ridge precision estimate.
main(["classify", str(work / "pp" / "train_filtered.csv"), str(work / "pp" / "test_filtered.csv"),
      "--precision", "ridge:1.0", "--out", str(work / "cls")])

ids, s_hat, t_hat, dv = read_decisions(work / "cls" / "decisions.csv")
chosen = dv.actions != 0
print(f"error rate among definitive decisions: {(dv.actions[chosen] != truth[chosen]).mean():.3f}")
print("outputs in", work)
