"""
Affine subspaces, hulls and independence
========================================

Three small arrangements in R^3 show how affine independence differs from
linear independence of the spans, and where the origin sits.
"""

import numpy as np

from affine_sc import (
    AffineSubspace,
    aff_dim,
    homogeneous_embed,
    is_affinely_disjoint,
    is_affinely_independent,
    origin_in_affine_hull,
    spans_linearly_independent,
)


def line(offset, direction):
    return AffineSubspace(np.array(offset, float), np.array(direction, float)[:, None])


# %%
# Two skew lines: one along x at height y=0.5, one along z at y=0.25.
# They neither meet nor run parallel, so their union spans a 3-dimensional hull.
skew = [line([0, 0.5, 0], [1, 0, 0]), line([0, 0.25, 0], [0, 0, 1])]
print("skew: disjoint", bool(is_affinely_disjoint(*skew)),
      "| independent", bool(is_affinely_independent(skew)))

# %%
# The hull is all of R^3 and so contains the origin. The spans of the two lines
# are planes through 0, and two planes in R^3 always share a line.
chk = spans_linearly_independent(skew)
print("skew: origin in hull", bool(origin_in_affine_hull(skew)),
      "| spans independent", bool(chk), "dims", chk.detail["dims"], "union", chk.lhs)

# %%
# Lifting every point x to [x; 1] turns the affine question into a linear one:
# the lifted spans are independent exactly when the lines are affinely independent.
print("skew: lifted spans independent", bool(spans_linearly_independent(skew, embed=True)))

# %%
# Two lines crossing at (0, 0.5, 0) share a point, so they are not disjoint.
crossing = [line([0, 0.5, 0], [1, 0, 0]), line([0, 0.5, 0], [0, 0, 1])]
print("crossing: disjoint", bool(is_affinely_disjoint(*crossing)))

# %%
# A line and an isolated point span a plane that misses the origin. Here both
# the affine and the linear notions of independence hold.
pt = AffineSubspace(np.array([0, 0, 0.5]), np.zeros((3, 0)))
lp = [skew[0], pt]
print("line+point: independent", bool(is_affinely_independent(lp)),
      "| origin in hull", bool(origin_in_affine_hull(lp)),
      "| spans independent", bool(spans_linearly_independent(lp)))

# %%
# Dimensions come from numerical ranks. The affine dimension of a point set is
# the rank of its lifted copy minus one.
P = np.column_stack([A.affine_basis() for A in lp])
print("aff_dim", aff_dim(P), "rank of lifted points", np.linalg.matrix_rank(homogeneous_embed(P)))
