"""
Clustering your own CSV file
============================

Rows are points. An optional last column headed ``label`` holds the ground
truth; without it only the cluster labels are written. The CLI equivalent is::

    affine-sc cluster points.csv --method A-SSC --out cluster_demo
"""

import json

import numpy as np

from affine_sc import DataMatrix, RandomModelSpec, generate_union_dataset, save_dataset
from affine_sc.experiments import run_dataset_cluster

data, _ = generate_union_dataset(RandomModelSpec(30, (3, 3, 3), 25, seed=11))
rng = np.random.default_rng(1)
noisy = DataMatrix(data.values + 0.02 * rng.standard_normal(data.values.shape), data.labels)
save_dataset(noisy, "points.csv")

# %%
# The sparse solver uses ADMM with a fixed penalty rho. The default of 1 is
# slow when lam = alpha / mu_z is large; a penalty nearer lam converges sooner.
summary = run_dataset_cluster("points.csv", "A-SSC", rho=10.0, out_dir="cluster_demo")
summary.pop("labels")
print(json.dumps(summary, indent=2))

# %%
# Without labels the cluster count must be given, and no metrics are reported.
save_dataset(DataMatrix(noisy.values), "points_unlabelled.csv")
summary = run_dataset_cluster("points_unlabelled.csv", "A-LSR", n=3)
print(summary["notice"], np.bincount(summary["labels"])[1:])
