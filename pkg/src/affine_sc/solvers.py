"""Self-expression solvers: LSR / A-LSR in closed form, SSC / A-SSC by ADMM.

Every solver returns a :class:`CoefficientMatrix` whose column ``j`` expresses
point ``x_j`` through the other points. The ``affine`` flag adds the
constraint that each column sums to one.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .data import DataMatrix
from .errors import DegenerateDataWarning, InfeasibleConstraint, InvalidMatrix, InvalidParameter
from .geometry import homogeneous_embed, pinv

# Tolerance for the exact-mode equality constraints after polishing.
EXACT_CONSTRAINT_TOL = 1e-6
# Relative residual accepted for a polished column during certification.
_FEASIBLE_TOL = 1e-10
# Support level (relative to the largest entry) used during certification.
_CERTIFY_LEVEL = 1e-6


class Regularizer(str, enum.Enum):
    L1 = "l1"
    FROBENIUS = "fro"  # 0.5 * ||C||_F^2


class Mode(str, enum.Enum):
    EXACT = "exact"
    NOISY = "noisy"


@dataclass(frozen=True)
class ADMMParams:
    """Iteration controls for the l1 solvers.

    Noisy mode keeps ``rho`` fixed. Exact mode starts every column at
    ``exact_rho`` and rebalances it every ``balance_every`` iterations;
    ``relaxation`` is the over-relaxation factor used there, and columns are
    tested for certified optimality every ``check_every`` iterations.
    """

    rho: float = 1.0
    max_iters: int = 2000
    abs_tol: float = 1e-6
    rel_tol: float = 1e-4
    exact_rho: float = 10.0
    balance_every: int = 10
    balance_ratio: float = 10.0
    relaxation: float = 1.6
    check_every: int = 50

    def __post_init__(self):
        if (self.rho <= 0 or self.exact_rho <= 0 or self.max_iters < 1
                or self.abs_tol <= 0 or self.rel_tol <= 0 or not 0 < self.relaxation < 2):
            raise InvalidParameter(f"invalid ADMM parameters {self}")


@dataclass(frozen=True)
class SolverConfig:
    regularizer: Regularizer = Regularizer.L1
    affine: bool = False
    mode: Mode = Mode.EXACT
    alpha: Optional[float] = None
    lam: Optional[float] = None
    zero_diagonal: Optional[bool] = None
    admm: ADMMParams = field(default_factory=ADMMParams)

    def __post_init__(self):
        reg = Regularizer(self.regularizer)
        mode = Mode(self.mode)
        object.__setattr__(self, "regularizer", reg)
        object.__setattr__(self, "mode", mode)
        zd = self.zero_diagonal
        if zd is None:
            zd = reg is Regularizer.L1
        if reg is Regularizer.L1 and not zd:
            raise InvalidParameter("the l1 regularizer requires a zero diagonal")
        if reg is Regularizer.FROBENIUS and zd:
            raise InvalidParameter("the Frobenius regularizer is unconstrained (no zero diagonal)")
        object.__setattr__(self, "zero_diagonal", zd)
        if mode is Mode.NOISY:
            if reg is Regularizer.L1 and self.alpha is None and self.lam is None:
                raise InvalidParameter("noisy l1 mode needs alpha or lam")
            if reg is Regularizer.FROBENIUS and self.lam is None:
                raise InvalidParameter("noisy Frobenius mode needs lam")
        for name in ("alpha", "lam"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidParameter(f"{name} must be positive, got {v}")

    @property
    def method(self) -> str:
        base = "SSC" if self.regularizer is Regularizer.L1 else "LSR"
        return ("A-" + base) if self.affine else base


METHODS = ("SSC", "A-SSC", "LSR", "A-LSR")


def method_config(method: str, mode="exact", *, alpha=None, lam=None,
                  admm: Optional[ADMMParams] = None) -> SolverConfig:
    """Build the :class:`SolverConfig` behind one of :data:`METHODS`."""
    if method not in METHODS:
        raise InvalidParameter(f"unknown method {method!r}; choose from {METHODS}")
    reg = Regularizer.L1 if method.endswith("SSC") else Regularizer.FROBENIUS
    return SolverConfig(regularizer=reg, affine=method.startswith("A-"), mode=Mode(mode),
                        alpha=alpha, lam=lam, admm=admm or ADMMParams())


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    """Solver output plus diagnostics.

    Attributes
    ----------
    C : ndarray, shape (N, N)
    residual : float
        ``||X - X C||_F``.
    affine_violation : float
        ``max |1^T C - 1^T|``.
    iterations : int
        0 for closed-form solvers.
    converged : bool
    history : dict
        Primal and dual residual traces for iterative solvers.
    """

    C: np.ndarray
    residual: float
    affine_violation: float
    method: str = ""
    iterations: int = 0
    converged: bool = True
    history: dict = field(default_factory=dict, repr=False)


def _values(X) -> np.ndarray:
    if isinstance(X, DataMatrix):
        return X.values
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidMatrix(f"data must be 2-D, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidMatrix("data has non-finite entries")
    return X


def _wrap(X, C, method, **kw) -> CoefficientMatrix:
    return CoefficientMatrix(
        C=C,
        residual=float(np.linalg.norm(X - X @ C)),
        affine_violation=float(np.max(np.abs(C.sum(axis=0) - 1.0), initial=0.0)),
        method=method,
        **kw,
    )


def lsr_exact(X, affine: bool = False) -> CoefficientMatrix:
    """Minimum-Frobenius-norm solution of ``X C = X`` (and ``1^T C = 1^T``).

    This is ``A^+ A`` with ``A = X`` or ``A = [X; 1^T]``.
    """
    X = _values(X)
    if X.shape[1] < 1:
        raise InvalidMatrix("need at least one point")
    A = homogeneous_embed(X) if affine else X
    C = pinv(A) @ A
    err = np.linalg.norm(A @ C - A, axis=0)
    scale = max(np.linalg.norm(A), 1.0)
    bad = np.flatnonzero(err > 1e-8 * scale)
    if bad.size:
        raise InfeasibleConstraint(int(bad[0]), float(err[bad[0]]))
    return _wrap(X, C, "A-LSR" if affine else "LSR")


def lsr_noisy(X, lam: float, affine: bool = False) -> CoefficientMatrix:
    """Minimizer of ``0.5 ||C||_F^2 + lam/2 ||X - X C||_F^2`` (s.t. ``1^T C = 1^T``).

    With ``W = (lam X^T X + I)^{-1}`` the linear solution is ``lam W X^T X``;
    the affine one adds ``v v^T / (1^T v)`` with ``v = W 1``.
    """
    if not lam > 0:
        raise InvalidParameter(f"lam must be positive, got {lam}")
    X = _values(X)
    N = X.shape[1]
    G = X.T @ X
    factor = cho_factor(lam * G + np.eye(N))
    C = cho_solve(factor, lam * G)
    if affine:
        v = cho_solve(factor, np.ones(N))
        C = C + np.outer(v, v) / v.sum()
    return _wrap(X, C, "A-LSR" if affine else "LSR")


def compute_mu_z(X) -> float:
    """``min_j max_{i != j} |<x_i, x_j>|``.

    Warns with :class:`DegenerateDataWarning` when the value is zero.
    """
    X = _values(X)
    if X.shape[1] < 2:
        raise InvalidMatrix("need at least two points")
    G = np.abs(X.T @ X)
    np.fill_diagonal(G, -np.inf)
    mu = float(G.max(axis=0).min())
    if mu <= 0.0:
        warnings.warn("some point is orthogonal to every other point (mu_z = 0)",
                      DegenerateDataWarning, stacklevel=2)
        return 0.0
    return mu


def _soft(V, t):
    return np.sign(V) * np.maximum(np.abs(V) - t, 0.0)


def _converged(C, Z, Z_old, U, rho, p):
    n = np.sqrt(C.size)
    r = np.linalg.norm(C - Z)
    s = rho * np.linalg.norm(Z - Z_old)
    eps_pri = n * p.abs_tol + p.rel_tol * max(np.linalg.norm(C), np.linalg.norm(Z))
    eps_dual = n * p.abs_tol + p.rel_tol * rho * np.linalg.norm(U)
    return r, s, eps_pri, (r <= eps_pri and s <= eps_dual)


def _check_exact_feasible(A):
    """Raise if some column of ``A`` is outside the span of the others."""
    N = A.shape[1]
    scale = max(np.linalg.norm(A), 1.0)
    for j in range(N):
        others = np.delete(A, j, axis=1)
        coef = np.linalg.lstsq(others, A[:, j], rcond=None)[0]
        r = np.linalg.norm(others @ coef - A[:, j])
        if r > EXACT_CONSTRAINT_TOL * scale:
            raise InfeasibleConstraint(j, float(r))


_POLISH_LEVELS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6, 1e-8, 0.0)


def _polish_exact(A, Z):
    """Turn the sparse ADMM iterate into exactly feasible columns.

    For each column, supports ``{i : |z_i| > t * max|z|}`` are tried over a
    ladder of relative levels ``t``. On each support the smallest correction
    restoring ``A c_j = a_j`` is computed; the feasible candidate with the
    least l1 norm wins. When no support is feasible, every off-diagonal index
    is allowed.
    """
    N = A.shape[1]
    C = np.zeros_like(Z)
    tol = _FEASIBLE_TOL * max(np.linalg.norm(A), 1.0)
    for j in range(N):
        z = Z[:, j]
        top = np.abs(z).max()
        best, best_norm = None, np.inf
        seen = set()
        for level in _POLISH_LEVELS:
            S = np.flatnonzero(np.abs(z) > level * top)
            key = S.tobytes()
            if S.size == 0 or key in seen:
                continue
            seen.add(key)
            c = _restore(A, z, S, j)
            norm = np.abs(c).sum()
            if np.linalg.norm(A @ c - A[:, j]) <= tol and norm < best_norm:
                best, best_norm = c, norm
        if best is None:
            best = _restore(A, z, np.delete(np.arange(N), j), j)
        C[:, j] = best
    return C


def _restore(A, z, S, j):
    AS = A[:, S]
    delta = np.linalg.lstsq(AS, A[:, j] - AS @ z[S], rcond=None)[0]
    c = np.zeros(A.shape[1])
    c[S] = z[S] + delta
    return c


def _certify(A, A_pinv, z, dual, j, gap_tol):
    """Try to prove a column optimal.

    The iterate is polished on its numerical support. A dual vector ``y`` is
    then fitted to the polished signs starting from the ADMM multiplier; the
    polished point is accepted when ``A_S^T y = sign(c_S)`` holds and
    ``max_{i != j} |a_i^T y| <= 1 / (1 - gap_tol)``. The relative gap
    between the feasible point and the dual bound is then at most
    ``gap_tol``. Returns the polished column or None.
    """
    top = np.abs(z).max()
    if top == 0.0:
        return None
    c = _restore(A, z, np.flatnonzero(np.abs(z) > _CERTIFY_LEVEL * top), j)
    scale = max(np.linalg.norm(A), 1.0)
    if np.linalg.norm(A @ c - A[:, j]) > _FEASIBLE_TOL * scale:
        return None
    S = np.flatnonzero(c)
    sign = np.sign(c[S])
    AS = A[:, S]
    y0 = A_pinv.T @ dual
    y = y0 + np.linalg.lstsq(AS.T, sign - AS.T @ y0, rcond=None)[0]
    if np.max(np.abs(AS.T @ y - sign)) > 1e-9:
        return None
    w = np.abs(A.T @ y)
    w[j] = 0.0
    if w.max() * (1.0 - gap_tol) > 1.0:
        return None
    return c


def _ssc_exact(X, A, p: ADMMParams):
    """ADMM for ``min ||Z||_1 s.t. A C = A, C = Z, diag(Z) = 0``.

    The C-step is the orthogonal projection onto ``{C : A C = A}``, applied
    as ``V - P (V - I)`` with the cached projector ``P = A^+ A``. Columns are
    independent problems, so each keeps its own penalty, rebalanced every
    ``balance_every`` steps so that primal and dual residuals stay within a
    factor ``balance_ratio`` of each other. Steps use over-relaxation.

    Every ``check_every`` steps each open column is offered to
    :func:`_certify`; certified columns are frozen and drop out of the
    iteration. Convergence means every column was certified.
    """
    N = A.shape[1]
    _check_exact_feasible(A)
    A_pinv = pinv(A)
    P = A_pinv @ A
    eye = np.eye(N)
    rho = np.full(N, float(p.exact_rho))
    relax = p.relaxation
    Z = np.zeros((N, N))
    U = np.zeros((N, N))
    out = np.zeros((N, N))
    open_ = np.ones(N, dtype=bool)
    rs, ss = [], []
    it = 0
    for it in range(1, p.max_iters + 1):
        cols = np.flatnonzero(open_)
        V = Z[:, cols] - U[:, cols]
        C = V - P @ (V - eye[:, cols])
        Ch = relax * C + (1.0 - relax) * Z[:, cols]
        Z_old = Z[:, cols]
        Zc = _soft(Ch + U[:, cols], 1.0 / rho[cols])
        Zc[cols, np.arange(cols.size)] = 0.0
        Uc = U[:, cols] + Ch - Zc
        Z[:, cols] = Zc
        U[:, cols] = Uc
        r = np.linalg.norm(C - Zc, axis=0)
        s = rho[cols] * np.linalg.norm(Zc - Z_old, axis=0)
        rs.append(float(np.linalg.norm(r)))
        ss.append(float(np.linalg.norm(s)))
        if it % p.balance_every == 0:
            up = cols[r > p.balance_ratio * s]
            down = cols[s > p.balance_ratio * r]
            rho[up] *= 2.0
            U[:, up] /= 2.0
            rho[down] /= 2.0
            U[:, down] *= 2.0
        if it % p.check_every == 0:
            for j in cols:
                c = _certify(A, A_pinv, Z[:, j], rho[j] * U[:, j], j, p.rel_tol)
                if c is not None:
                    out[:, j] = c
                    open_[j] = False
            if not open_.any():
                break
    left = np.flatnonzero(open_)
    if left.size:
        out[:, left] = _polish_exact(A, Z)[:, left]
    hist = {"primal": np.array(rs), "dual": np.array(ss), "rho": rho,
            "uncertified": left}
    return out, it, not left.size, hist


def _ssc_noisy(X, lam, affine, p: ADMMParams):
    """ADMM for ``min ||Z||_1 + lam/2 ||X - X C||^2`` with ``C = Z``, ``diag(Z) = 0``.

    The C-step solves ``(lam G + rho I) C = lam G + rho (Z - U)`` with one
    cached Cholesky factor; the column-sum constraint, when requested, is
    folded in through the factor applied to the ones vector.
    """
    N = X.shape[1]
    G = X.T @ X
    rho = p.rho
    factor = cho_factor(lam * G + rho * np.eye(N))
    lamG = lam * G
    ones = np.ones(N)
    if affine:
        v = cho_solve(factor, ones)
        v_sum = v.sum()
    Z = np.zeros((N, N))
    U = np.zeros((N, N))
    rs, ss, eps = [], [], []
    converged = False
    it = 0
    for it in range(1, p.max_iters + 1):
        C = cho_solve(factor, lamG + rho * (Z - U))
        if affine:
            C -= np.outer(v, (C.sum(axis=0) - 1.0) / v_sum)
        Z_old = Z
        Z = _soft(C + U, 1.0 / rho)
        np.fill_diagonal(Z, 0.0)
        U = U + C - Z
        r, s, e, done = _converged(C, Z, Z_old, U, rho, p)
        rs.append(r)
        ss.append(s)
        eps.append(e)
        if done:
            converged = True
            break
    if affine:
        Z = _fix_column_sums(Z, C)
    return Z, it, converged, {"primal": np.array(rs), "dual": np.array(ss),
                              "primal_tol": np.array(eps), "rho": rho}


def _fix_column_sums(Z, C):
    """Spread each column's sum defect evenly over that column's support.

    Zero entries stay zero, so the support (and the diagonal) is unchanged.
    An empty column borrows the largest off-diagonal entry of ``C``.
    """
    Z = Z.copy()
    N = Z.shape[0]
    for j in range(N):
        S = np.flatnonzero(Z[:, j])
        if S.size == 0:
            c = np.abs(C[:, j])
            c[j] = -1.0
            S = np.array([int(np.argmax(c))]) if N > 1 else S
            if S.size == 0:
                continue
        Z[S, j] += (1.0 - Z[:, j].sum()) / S.size
    return Z


def ssc_solve(X, cfg: SolverConfig) -> CoefficientMatrix:
    """Sparse self-expression with an ADMM splitting.

    Exact mode solves ``min ||c||_1 s.t. X c = x_j, c_j = 0`` (plus
    ``1^T c = 1`` if affine) for all columns at once and then polishes each
    column on its support so the equality constraints hold to 1e-6.

    Noisy mode minimizes ``||C||_1 + lam/2 ||X - X C||_F^2`` with
    ``lam = alpha / mu_z`` unless ``cfg.lam`` is given directly.

    A run that hits ``max_iters`` returns its final iterate with
    ``converged=False``.
    """
    cfg = cfg if isinstance(cfg, SolverConfig) else SolverConfig(**cfg)
    if cfg.regularizer is not Regularizer.L1:
        raise InvalidParameter("ssc_solve requires the l1 regularizer")
    X = _values(X)
    if X.shape[1] < 2:
        raise InvalidMatrix("need at least two points")
    if cfg.mode is Mode.EXACT:
        A = homogeneous_embed(X) if cfg.affine else X
        C, it, ok, hist = _ssc_exact(X, A, cfg.admm)
    else:
        lam = cfg.lam
        if cfg.alpha is not None:
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                mu = compute_mu_z(X)
            if mu > 0:
                lam = cfg.alpha / mu
            else:
                for w in caught:
                    warnings.warn(w.message, w.category, stacklevel=2)
                if lam is None:
                    raise InvalidParameter("mu_z is zero and no fallback lam was given")
        C, it, ok, hist = _ssc_noisy(X, lam, cfg.affine, cfg.admm)
        hist["lam"] = lam
    np.fill_diagonal(C, 0.0)
    return _wrap(X, C, cfg.method, iterations=it, converged=ok, history=hist)


def solve(X, cfg: SolverConfig) -> CoefficientMatrix:
    """Dispatch ``cfg`` to the matching solver."""
    if cfg.regularizer is Regularizer.L1:
        return ssc_solve(X, cfg)
    if cfg.mode is Mode.EXACT:
        return lsr_exact(X, cfg.affine)
    return lsr_noisy(X, cfg.lam, cfg.affine)


def with_admm(cfg: SolverConfig, **changes) -> SolverConfig:
    return replace(cfg, admm=replace(cfg.admm, **changes))
