"""Rank-based affine geometry.

Every dimension below is a numerical rank. Affine hull dimensions are
computed through the homogeneous embedding ``x -> [x; 1]``: the span of the
lifted points has dimension one more than the affine hull of the originals,
so no anchor point has to be chosen.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateBasis, DimensionMismatch, EmptyInput, InvalidMatrix

DEFAULT_RELATIVE_EPS = 1e-10


@dataclass(frozen=True)
class RankTolerance:
    """Relative singular-value cutoff used by :func:`numerical_rank`."""

    relative_eps: float = DEFAULT_RELATIVE_EPS

    def __post_init__(self):
        if not (0.0 < self.relative_eps < 1.0):
            raise ValueError(f"relative_eps must lie in (0, 1), got {self.relative_eps}")


DEFAULT_TOL = RankTolerance()


def _as_tol(tol) -> RankTolerance:
    if tol is None:
        return DEFAULT_TOL
    if isinstance(tol, RankTolerance):
        return tol
    return RankTolerance(float(tol))


def _finite_2d(M, name="matrix") -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim == 1:
        M = M[:, None]
    if M.ndim != 2:
        raise InvalidMatrix(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidMatrix(f"{name} has non-finite entries")
    return M


def singular_cutoff(s: np.ndarray, shape, tol=None) -> float:
    """Threshold below which singular values ``s`` count as zero."""
    tol = _as_tol(tol)
    if s.size == 0:
        return 0.0
    return tol.relative_eps * float(s.max()) * max(shape)


def numerical_rank(M, tol=None) -> int:
    """Number of singular values above ``relative_eps * s_max * max(rows, cols)``."""
    M = _finite_2d(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > singular_cutoff(s, M.shape, tol)))


def pinv(M, tol=None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with the package-wide rank cutoff."""
    M = _finite_2d(M)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    keep = s > singular_cutoff(s, M.shape, tol) if s.size and s[0] > 0 else np.zeros_like(s, bool)
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def _points_matrix(points) -> np.ndarray:
    """Stack a list of D-vectors (or a D x N matrix) into a D x N array."""
    if isinstance(points, np.ndarray) and points.ndim == 2:
        P = points
    else:
        pts = list(points)
        if not pts:
            raise EmptyInput("no points given")
        P = np.column_stack([np.asarray(p, dtype=float).ravel() for p in pts])
    P = _finite_2d(P, "points")
    if P.shape[1] == 0:
        raise EmptyInput("no points given")
    return P


def homogeneous_embed(X) -> np.ndarray:
    """Append a row of ones: column ``x`` becomes ``[x; 1]``."""
    X = _finite_2d(X, "X")
    return np.vstack([X, np.ones((1, X.shape[1]))])


def span_dim(points, tol=None) -> int:
    """Dimension of the linear span of ``points``."""
    return numerical_rank(_points_matrix(points), tol)


def aff_dim(points, tol=None) -> int:
    """Dimension of the affine hull of ``points`` (0 for a single point)."""
    return numerical_rank(homogeneous_embed(_points_matrix(points)), tol) - 1


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """The set ``{offset + basis @ u}``.

    ``basis`` is D x d with full column rank; ``d = 0`` gives a single point.
    A rank-deficient basis is rejected here rather than silently re-ranked.
    """

    offset: np.ndarray
    basis: np.ndarray
    tol: RankTolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        offset = np.asarray(self.offset, dtype=float).ravel()
        D = offset.shape[0]
        basis = np.asarray(self.basis, dtype=float)
        if basis.size == 0:
            basis = np.zeros((D, 0))
        elif basis.ndim == 1:
            basis = basis[:, None]
        if basis.shape[0] != D:
            raise DimensionMismatch(f"basis has {basis.shape[0]} rows, offset has length {D}")
        if not (np.all(np.isfinite(offset)) and np.all(np.isfinite(basis))):
            raise InvalidMatrix("non-finite subspace data")
        d = basis.shape[1]
        if d >= D:
            raise DegenerateBasis(f"dimension {d} must be below ambient dimension {D}")
        if d and numerical_rank(basis, self.tol) != d:
            raise DegenerateBasis(f"basis of {d} columns is rank deficient")
        offset.setflags(write=False)
        basis.setflags(write=False)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def from_points(cls, points, tol=None) -> "AffineSubspace":
        """Affine hull of a set of affinely independent points."""
        P = _points_matrix(points)
        return cls(P[:, 0], P[:, 1:] - P[:, :1], _as_tol(tol))

    @property
    def ambient_dim(self) -> int:
        return self.offset.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def affine_basis(self) -> np.ndarray:
        """``d + 1`` points whose affine hull is the subspace, as columns."""
        return np.column_stack([self.offset, self.offset[:, None] + self.basis])

    def residual(self, x) -> np.ndarray:
        """Distance of each column of ``x`` from the subspace."""
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        r = x - self.offset[:, None]
        if self.dim:
            Q = direction_subspace(self)
            r = r - Q @ (Q.T @ r)
        return np.linalg.norm(r, axis=0)


def direction_subspace(A: AffineSubspace) -> np.ndarray:
    """Orthonormal D x d basis of the direction subspace of ``A``."""
    if A.dim == 0:
        return np.zeros((A.ambient_dim, 0))
    Q, R = np.linalg.qr(A.basis)
    if numerical_rank(R, A.tol) != A.dim:
        raise DegenerateBasis("direction basis lost rank")
    return Q


@dataclass(frozen=True)
class GeometryCheck:
    """Outcome of a geometric predicate together with the dimensions behind it.

    Truthiness follows ``holds`` so the object can be used as a plain boolean.
    """

    holds: bool
    lhs: int
    rhs: int
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.holds)


def _check_common(subspaces: Sequence[AffineSubspace]) -> int:
    subspaces = list(subspaces)
    if not subspaces:
        raise EmptyInput("no subspaces given")
    D = subspaces[0].ambient_dim
    for A in subspaces[1:]:
        if A.ambient_dim != D:
            raise DimensionMismatch(f"ambient dimensions {D} and {A.ambient_dim} differ")
    return D


def _union_points(subspaces) -> np.ndarray:
    return np.hstack([A.affine_basis() for A in subspaces])


def is_affinely_disjoint(A: AffineSubspace, B: AffineSubspace, tol=None) -> GeometryCheck:
    """``dim aff(A u B) == dim A + dim B + 1``."""
    _check_common([A, B])
    lhs = aff_dim(_union_points([A, B]), tol)
    rhs = A.dim + B.dim + 1
    return GeometryCheck(lhs == rhs, lhs, rhs)


def is_affinely_independent(subspaces: Sequence[AffineSubspace], tol=None) -> GeometryCheck:
    """``dim aff(union) + 1 == sum(dims) + n``; the left side never exceeds the right."""
    subspaces = list(subspaces)
    _check_common(subspaces)
    lhs = aff_dim(_union_points(subspaces), tol) + 1
    rhs = sum(A.dim for A in subspaces) + len(subspaces)
    return GeometryCheck(lhs == rhs, lhs, rhs)


def origin_in_affine_hull(subspaces: Sequence[AffineSubspace], tol=None) -> GeometryCheck:
    """Whether 0 lies in the affine hull of the union of ``subspaces``."""
    subspaces = list(subspaces)
    D = _check_common(subspaces)
    P = _union_points(subspaces)
    before = aff_dim(P, tol)
    after = aff_dim(np.hstack([P, np.zeros((D, 1))]), tol)
    return GeometryCheck(after == before, after, before)


def spans_linearly_independent(subspaces: Sequence[AffineSubspace], tol=None,
                               embed: bool = False) -> GeometryCheck:
    """Linear independence of ``{span(A_l)}`` or, with ``embed``, of the lifted spans.

    Without embedding, each ``dim span(A_l)`` is ``dim A_l`` when the subspace
    passes through the origin and ``dim A_l + 1`` otherwise. Lifted spans
    always have dimension ``dim A_l + 1``.
    """
    subspaces = list(subspaces)
    _check_common(subspaces)
    if embed:
        dims = [A.dim + 1 for A in subspaces]
        union = span_dim(homogeneous_embed(_union_points(subspaces)), tol)
    else:
        dims = [A.dim + (0 if origin_in_affine_hull([A], tol) else 1) for A in subspaces]
        union = span_dim(_union_points(subspaces), tol)
    total = sum(dims)
    return GeometryCheck(union == total, union, total, {"dims": dims})
