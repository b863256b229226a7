"""Affinity construction and normalized spectral clustering."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from sklearn.cluster import KMeans

from .errors import DisconnectedAffinityWarning, InvalidMatrix, InvalidParameter

DEGREE_GUARD = 1e-12
N_RESTARTS = 20
KMEANS_ITERS = 300


@dataclass(frozen=True, eq=False)
class ClusteringResult:
    """Labels in ``1..n`` plus spectral diagnostics."""

    labels: np.ndarray
    eigenvalues: np.ndarray
    inertia: float
    seed: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def eigengap(self) -> float:
        """Gap between the n-th and (n+1)-th smallest Laplacian eigenvalues."""
        k = self.diagnostics.get("n_clusters", 0)
        ev = self.eigenvalues
        return float(ev[k] - ev[k - 1]) if 0 < k < ev.size else float("nan")


def build_affinity(C) -> np.ndarray:
    """``W = |C| + |C^T|``."""
    C = np.asarray(getattr(C, "C", C), dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InvalidMatrix(f"coefficient matrix must be square, got {C.shape}")
    if not np.all(np.isfinite(C)):
        raise InvalidMatrix("coefficient matrix has non-finite entries")
    A = np.abs(C)
    return A + A.T


def normalized_laplacian(W) -> np.ndarray:
    """``I - D^{-1/2} W D^{-1/2}``; isolated vertices use the degree guard."""
    deg = np.maximum(W.sum(axis=1), DEGREE_GUARD)
    s = 1.0 / np.sqrt(deg)
    L = np.eye(W.shape[0]) - s[:, None] * W * s[None, :]
    return 0.5 * (L + L.T)


def spectral_cluster(W, n: int, seed: int = 0) -> ClusteringResult:
    """Cluster the graph ``W`` into ``n`` groups.

    The ``n`` eigenvectors of the normalized Laplacian with smallest
    eigenvalues are row-normalized and grouped by k-means (k-means++ seeding,
    20 restarts, best inertia kept).
    """
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise InvalidMatrix(f"affinity must be square, got {W.shape}")
    if not np.all(np.isfinite(W)) or np.any(W < 0):
        raise InvalidMatrix("affinity must be finite and nonnegative")
    N = W.shape[0]
    if not 1 <= n <= N:
        raise InvalidParameter(f"cluster count {n} must lie in [1, {N}]")
    diagnostics = {"n_clusters": n}
    if not np.any(W):
        warnings.warn("affinity is identically zero", DisconnectedAffinityWarning, stacklevel=2)
        diagnostics["disconnected"] = True

    evals, evecs = np.linalg.eigh(normalized_laplacian(W))
    emb = evecs[:, :n]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    emb = np.divide(emb, norms, out=np.zeros_like(emb), where=norms > 0)

    if n == 1:
        return ClusteringResult(np.ones(N, dtype=np.int64), evals, 0.0, seed, diagnostics)
    km = KMeans(n_clusters=n, init="k-means++", n_init=N_RESTARTS, max_iter=KMEANS_ITERS,
                random_state=np.random.RandomState(seed % 2**32))
    raw = km.fit_predict(emb)
    return ClusteringResult(_relabel(raw), evals, float(km.inertia_), seed, diagnostics)


def _relabel(raw) -> np.ndarray:
    """Map labels to ``1..k`` in order of first appearance."""
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(np.argsort(first))
    return order[np.unique(raw, return_inverse=True)[1]].astype(np.int64) + 1
