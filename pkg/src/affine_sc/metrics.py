"""Subspace-preserving rate and clustering accuracy."""
from __future__ import annotations

import warnings

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatch, ZeroColumnWarning


def _coef(C):
    return np.asarray(getattr(C, "C", C), dtype=float)


def _labels(p):
    return np.asarray(getattr(p, "labels", p)).ravel()


def truth_mask(labels) -> np.ndarray:
    """Ground-truth affinity: ``w_ij = 1`` iff points i and j share a label."""
    p = _labels(labels)
    return p[:, None] == p[None, :]


def _check(C, p):
    if C.ndim != 2 or C.shape[0] != C.shape[1] or C.shape[0] != p.size:
        raise DimensionMismatch(f"coefficients {C.shape} do not match {p.size} labels")


def spr(C, truth) -> float:
    """Mean over columns of the fraction of l1 mass placed on same-class points.

    A zero column counts as 1 and triggers :class:`ZeroColumnWarning`.
    """
    C = np.abs(_coef(C))
    p = _labels(truth)
    _check(C, p)
    mass = C.sum(axis=0)
    inside = np.where(truth_mask(p), C, 0.0).sum(axis=0)
    zero = mass == 0
    if zero.any():
        warnings.warn(f"{int(zero.sum())} zero column(s) counted as subspace-preserving",
                      ZeroColumnWarning, stacklevel=2)
    ratio = np.divide(inside, mass, out=np.ones_like(mass), where=~zero)
    return float(ratio.mean())


def is_subspace_preserving(C, truth, tol: float = 1e-6) -> bool:
    """True when off-block l1 mass is at most ``tol`` times the total mass."""
    C = np.abs(_coef(C))
    p = _labels(truth)
    _check(C, p)
    total = C.sum()
    off = np.where(truth_mask(p), 0.0, C).sum()
    return bool(off <= tol * total)


def confusion(pred, truth):
    """Contingency table between two labelings plus their label alphabets."""
    pred = _labels(pred)
    truth = _labels(truth)
    if pred.size != truth.size:
        raise DimensionMismatch(f"{pred.size} predicted vs {truth.size} true labels")
    pa, pi = np.unique(pred, return_inverse=True)
    ta, ti = np.unique(truth, return_inverse=True)
    M = np.zeros((pa.size, ta.size), dtype=np.int64)
    np.add.at(M, (pi, ti), 1)
    return M, pa, ta


def acc(pred, truth) -> float:
    """Best agreement fraction over one-to-one relabelings of ``pred``."""
    M, _, _ = confusion(pred, truth)
    if M.size == 0:
        return 1.0
    rows, cols = linear_sum_assignment(M, maximize=True)
    return float(M[rows, cols].sum() / M.sum())
