"""
Self-expression with and without the affine constraint
=======================================================

Each point is written as a combination of the others. The coefficient
matrix C feeds a spectral clustering step; SPR measures how much of each
column's weight stays inside the point's own subspace.
"""

import numpy as np

from affine_sc import (
    ADMMParams,
    RandomModelSpec,
    acc,
    build_affinity,
    generate_union_dataset,
    method_config,
    solve,
    spectral_cluster,
    spr,
)

# %%
# D=22 is below the size where least squares keeps the blocks apart, but the
# sparse solutions still do.
data, _ = generate_union_dataset(RandomModelSpec(22, (4,) * 5, 20, seed=3))
for method in ("SSC", "A-SSC", "LSR", "A-LSR"):
    out = solve(data, method_config(method))
    pred = spectral_cluster(build_affinity(out), 5, seed=0).labels
    print(f"{method:6s} SPR={spr(out, data):.3f} ACC={acc(pred, data.labels):.3f} "
          f"colsum err={out.affine_violation:.1e} converged={out.converged}")

# %%
# At D=30 the least-squares solutions become block diagonal too.
data30, _ = generate_union_dataset(RandomModelSpec(30, (4,) * 5, 20, seed=3))
C = solve(data30, method_config("A-LSR")).C
print("A-LSR at D=30, SPR =", spr(C, data30))

# %%
# Noisy data: penalize the residual instead of forcing X = XC. For the sparse
# model lam = alpha / mu_z, where mu_z is the smallest "best" coherence.
# A penalty rho closer to lam than the default of 1 speeds up the ADMM loop.
rng = np.random.default_rng(0)
noisy = data30.values + 0.01 * rng.standard_normal(data30.values.shape)
for method in ("A-SSC", "A-LSR"):
    out = solve(noisy, method_config(method, "noisy", alpha=50.0, lam=100.0,
                                          admm=ADMMParams(rho=10.0)))
    pred = spectral_cluster(build_affinity(out), 5, seed=0).labels
    print(f"noisy {method}: SPR={spr(out, data30.labels):.3f} "
          f"ACC={acc(pred, data30.labels):.3f} iterations={out.iterations}")
