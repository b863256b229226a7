"""
Random unions of affine subspaces
=================================

Five random 4-dimensional affine subspaces need room to be independent. We
count, over many seeds, how often each property holds as D grows.
"""

from affine_sc import RandomModelSpec, generate_union_dataset, sample_random_model
from affine_sc import is_affinely_independent, origin_in_affine_hull
from affine_sc.experiments import run_geometry_verification

dims = (4, 4, 4, 4, 4)

# %%
# sum(d) + n = 25 here. Affine independence appears one dimension earlier than
# room for the origin to fall outside the hull.
for D in range(22, 27):
    indep = free = 0
    for seed in range(50):
        subs = sample_random_model(RandomModelSpec(D, dims, 1, seed))
        a = bool(is_affinely_independent(subs))
        indep += a
        free += a and not origin_in_affine_hull(subs)
    print(f"D={D}: affinely independent {indep}/50, also origin-free {free}/50")

# %%
# A labelled dataset: 20 points on the unit sphere of each subspace, centred
# at that subspace's offset.
data, subs = generate_union_dataset(RandomModelSpec(30, dims, 20, seed=7))
print(data.values.shape, "labels per class", [int((data.labels == k).sum()) for k in range(1, 6)])
print("max distance to own subspace",
      max(float(A.residual(data.values[:, data.labels == k + 1]).max()) for k, A in enumerate(subs)))

# %%
# The same counts, plus cross-checks of the equivalences on randomly shaped
# arrangements, are bundled in one report.
report = run_geometry_verification(trials=100, dims=dims, mixed=200)
for row in report.rows:
    print(row)
print(report.mixed, "violations:", report.violations)
