"""Synthetic sweeps, geometry verification, and clustering of CSV datasets."""
from __future__ import annotations

import csv
import json
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .clustering import build_affinity, spectral_cluster
from .data import (
    RandomModelSpec,
    derive_seed,
    generate_union_dataset,
    load_dataset,
    sample_random_model,
)
from .errors import DegenerateBasis, EmptyInput, InvalidParameter, ZeroColumnWarning
from .geometry import (
    AffineSubspace,
    is_affinely_independent,
    origin_in_affine_hull,
    span_dim,
    spans_linearly_independent,
)
from .metrics import acc, spr
from .solvers import METHODS, ADMMParams, method_config, solve

DEFAULT_ALPHA = 50.0
DEFAULT_LAM = 100.0


@dataclass
class SweepConfig:
    """Settings for a sweep over the ambient dimension.

    ``D_range`` is inclusive. ``alpha`` feeds noisy SSC / A-SSC through
    ``lam = alpha / mu_z``; ``lam`` feeds noisy LSR / A-LSR.
    """

    d: int = 4
    n: int = 5
    N: int = 100
    D_range: tuple = (5, 30)
    trials: int = 20
    methods: tuple = METHODS
    mode: str = "exact"
    alpha: float = DEFAULT_ALPHA
    lam: float = DEFAULT_LAM
    max_iters: int = 2000
    master_seed: int = 0
    threads: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        self.D_range = tuple(int(v) for v in self.D_range)
        self.methods = tuple(self.methods)
        if len(self.D_range) != 2 or self.D_range[0] > self.D_range[1]:
            raise InvalidParameter(f"D_range must be (lo, hi) with lo <= hi, got {self.D_range}")
        if self.D_range[0] <= self.d:
            raise InvalidParameter("every ambient dimension must exceed d")
        if self.n < 1 or self.N % self.n:
            raise InvalidParameter(f"N={self.N} must be a positive multiple of n={self.n}")
        if self.trials < 1:
            raise InvalidParameter("trials must be at least 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise InvalidParameter(f"unknown methods {bad}; choose from {METHODS}")
        if self.mode not in ("exact", "noisy"):
            raise InvalidParameter(f"mode must be 'exact' or 'noisy', got {self.mode!r}")
        if self.threads < 1:
            raise InvalidParameter("threads must be at least 1")

    @classmethod
    def from_mapping(cls, values: dict) -> "SweepConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise InvalidParameter(f"unknown config keys: {sorted(unknown)}")
        return cls(**values)

    @property
    def dims(self) -> list:
        return list(range(self.D_range[0], self.D_range[1] + 1))

    def solver_config(self, method):
        admm = ADMMParams(max_iters=self.max_iters)
        if self.mode == "exact":
            return method_config(method, "exact", admm=admm)
        if method.endswith("SSC"):
            return method_config(method, "noisy", alpha=self.alpha, admm=admm)
        return method_config(method, "noisy", lam=self.lam, admm=admm)


RAW_FIELDS = ("method", "D", "trial", "seed", "spr", "acc", "residual",
              "affine_violation", "iterations", "converged")
AGG_FIELDS = ("method", "D", "trials", "mean_spr", "mean_acc", "min_spr", "converged_frac")


@dataclass
class SweepResult:
    """Raw rows (one per method, D, trial) and their per-(method, D) means."""

    rows: list
    config: Optional[SweepConfig] = None
    timings: list = field(default_factory=list)

    def aggregate(self) -> list:
        groups = {}
        for r in self.rows:
            groups.setdefault((r["method"], r["D"]), []).append(r)
        order = {m: i for i, m in enumerate(METHODS)}
        out = []
        for (m, D) in sorted(groups, key=lambda k: (order.get(k[0], 99), k[0], k[1])):
            g = groups[(m, D)]
            out.append({
                "method": m,
                "D": D,
                "trials": len(g),
                "mean_spr": float(np.mean([r["spr"] for r in g])),
                "mean_acc": float(np.mean([r["acc"] for r in g])),
                "min_spr": float(np.min([r["spr"] for r in g])),
                "converged_frac": float(np.mean([bool(r["converged"]) for r in g])),
            })
        return out

    def mean(self, method, D, metric="spr") -> float:
        for a in self.aggregate():
            if a["method"] == method and a["D"] == D:
                return a[f"mean_{metric}"]
        raise KeyError((method, D))

    def write(self, out_dir) -> dict:
        """Write ``raw.csv``, ``aggregate.csv`` and ``timings.csv``.

        Wall times go to their own file so the first two stay byte-identical
        across repeated runs.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"raw": out / "raw.csv", "aggregate": out / "aggregate.csv",
                 "timings": out / "timings.csv"}
        _write_csv(paths["raw"], RAW_FIELDS, self.rows)
        _write_csv(paths["aggregate"], AGG_FIELDS, self.aggregate())
        _write_csv(paths["timings"], ("method", "D", "trial", "seconds"), self.timings)
        return paths

    @classmethod
    def read(cls, path) -> "SweepResult":
        """Load rows from a ``raw.csv`` or ``aggregate.csv`` file."""
        with open(path, newline="", encoding="utf-8") as fh:
            records = list(csv.DictReader(fh))
        rows = []
        for rec in records:
            if "mean_spr" in rec:
                for t in range(int(rec["trials"])):
                    rows.append({"method": rec["method"], "D": int(rec["D"]), "trial": t,
                                 "spr": float(rec["mean_spr"]), "acc": float(rec["mean_acc"]),
                                 "converged": float(rec["converged_frac"]) == 1.0})
            else:
                rows.append({"method": rec["method"], "D": int(rec["D"]),
                             "trial": int(rec["trial"]), "seed": int(rec["seed"]),
                             "spr": float(rec["spr"]), "acc": float(rec["acc"]),
                             "residual": float(rec["residual"]),
                             "affine_violation": float(rec["affine_violation"]),
                             "iterations": int(rec["iterations"]),
                             "converged": rec["converged"] == "1"})
        return cls(rows)


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _write_csv(path, names, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for r in rows:
            w.writerow([_fmt(r[k]) for k in names])


def run_pipeline(X, labels, method_cfg, n, seed):
    """Solve, cluster, and score one dataset; returns (coefficients, clustering, metrics)."""
    coef = solve(X, method_cfg)
    result = spectral_cluster(build_affinity(coef), n, seed=seed)
    metrics = {}
    if labels is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ZeroColumnWarning)
            metrics["spr"] = spr(coef, labels)
        metrics["acc"] = acc(result.labels, labels)
    return coef, result, metrics


def _run_cell(cfg: SweepConfig, D: int, trial: int):
    seed = derive_seed(cfg.master_seed, D, trial)
    spec = RandomModelSpec(D, (cfg.d,) * cfg.n, cfg.N // cfg.n, seed)
    data, _ = generate_union_dataset(spec)
    rows, timings = [], []
    for method in cfg.methods:
        t0 = time.perf_counter()
        coef, _, m = run_pipeline(data.values, data.labels, cfg.solver_config(method),
                                  cfg.n, seed % 2**32)
        timings.append({"method": method, "D": D, "trial": trial,
                        "seconds": time.perf_counter() - t0})
        rows.append({"method": method, "D": D, "trial": trial, "seed": seed,
                     "spr": m["spr"], "acc": m["acc"], "residual": coef.residual,
                     "affine_violation": coef.affine_violation,
                     "iterations": coef.iterations, "converged": bool(coef.converged)})
    return rows, timings


def run_synthetic_sweep(cfg: SweepConfig) -> SweepResult:
    """Generate one dataset per (D, trial) and run every method on it.

    Cell seeds come from ``derive_seed(master_seed, D, trial)`` and rows are
    sorted afterwards, so results do not depend on ``cfg.threads``.
    """
    cells = [(D, t) for D in cfg.dims for t in range(cfg.trials)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            parts = list(pool.map(_run_cell, [cfg] * len(cells), *zip(*cells)))
    else:
        parts = [_run_cell(cfg, D, t) for D, t in cells]
    order = {m: i for i, m in enumerate(METHODS)}
    key = lambda r: (order[r["method"]], r["D"], r["trial"])  # noqa: E731
    rows = sorted((r for p in parts for r in p[0]), key=key)
    timings = sorted((t for p in parts for t in p[1]), key=key)
    result = SweepResult(rows, cfg, timings)
    if cfg.output:
        result.write(cfg.output)
    return result


# --- geometry verification -------------------------------------------------

@dataclass
class GeometryReport:
    """Counts per ambient dimension and every equivalence violation found."""

    dims: tuple
    trials: int
    rows: list = field(default_factory=list)
    mixed: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def count(self, D, key) -> int:
        for r in self.rows:
            if r["D"] == D:
                return r[key]
        raise KeyError(D)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _check_arrangement(subspaces, tag, seed, violations, check_span_rule=True):
    """Cross-check the equivalences on one arrangement; returns the raw checks."""
    aff = is_affinely_independent(subspaces)
    origin = origin_in_affine_hull(subspaces)
    emb = spans_linearly_independent(subspaces, embed=True)
    lin = spans_linearly_independent(subspaces, embed=False)
    D = subspaces[0].ambient_dim
    total = sum(A.dim for A in subspaces) + len(subspaces)

    def fail(rule):
        violations.append({"rule": rule, "source": tag, "seed": int(seed)})

    if aff.lhs > aff.rhs:
        fail("affine hull bound")
    if bool(emb) != bool(aff):
        fail("lifted-span independence <=> affine independence")
    if check_span_rule and bool(lin) != (bool(aff) and not origin):
        fail("span independence <=> affine independence and origin outside hull")
    if aff and D < total - 1:
        fail("affine independence needs D >= sum(d) + n - 1")
    if aff and not origin:
        union = np.hstack([A.affine_basis() for A in subspaces])
        if span_dim(union) != total:
            fail("span of union has dimension sum(d) + n")
    for A in subspaces:
        pts = A.affine_basis()
        expect = A.dim + (0 if origin_in_affine_hull([A]) else 1)
        if span_dim(pts) != expect:
            fail("span dimension of a single subspace")
    return aff, origin, emb, lin


def random_arrangement(rng: np.random.Generator, offset_floor: float = 1e-3):
    """A random collection of affine subspaces, often deliberately degenerate.

    Each subspace is drawn in one of several ways: generic, through the
    origin, parallel to an earlier one, meeting an earlier one, or with its
    offset inside the hull of the earlier ones. Some arrangements are also
    squeezed into a random lower-dimensional flat. Returns the subspaces and
    whether every subspace stays at least ``offset_floor`` away from 0.
    """
    while True:
        D = int(rng.integers(2, 9))
        n = int(rng.integers(1, 5))
        flat = None
        if rng.random() < 0.2 and D > 2:
            k = int(rng.integers(1, D))
            flat = (rng.standard_normal(D), np.linalg.qr(rng.standard_normal((D, k)))[0])
        subs = []
        try:
            for _ in range(n):
                subs.append(_random_subspace(rng, D, subs, flat))
        except DegenerateBasis:
            continue
        far = all(A.residual(np.zeros(D))[0] >= offset_floor for A in subs)
        return subs, far


def _random_subspace(rng, D, previous, flat):
    hi = D - 1 if flat is None else flat[1].shape[1]
    d = int(rng.integers(0, max(hi, 0) + 1)) if hi > 0 else 0
    d = min(d, 3, D - 1)
    kind = rng.choice(["generic", "linear", "parallel", "meeting", "hull"]) if previous else \
        rng.choice(["generic", "linear"])
    if flat is not None:
        base, Q = flat
        k = Q.shape[1]
        d = min(d, k)
        basis = Q @ rng.standard_normal((k, d))
        offset = base + Q @ rng.standard_normal(k)
        if kind == "linear":
            offset = np.zeros(D)
        return AffineSubspace(offset, basis)
    basis = rng.standard_normal((D, d))
    offset = rng.standard_normal(D)
    if kind == "linear":
        offset = np.zeros(D)
    elif kind == "parallel":
        other = previous[int(rng.integers(len(previous)))]
        if other.dim and d:
            m = min(d, other.dim)
            basis[:, :m] = other.basis[:, :m]
    elif kind == "meeting":
        other = previous[int(rng.integers(len(previous)))]
        offset = other.offset + other.basis @ rng.standard_normal(other.dim)
    elif kind == "hull":
        pts = np.hstack([A.affine_basis() for A in previous])
        k = pts.shape[1]
        w = rng.standard_normal(k)
        offset = pts @ (w - w.mean() + 1.0 / k)
    return AffineSubspace(offset, basis)


def run_geometry_verification(trials: int = 100, dims: Sequence[int] = (4, 4, 4, 4, 4),
                              ambient: Optional[Sequence[int]] = None, seed: int = 0,
                              mixed: int = 1000) -> GeometryReport:
    """Sample random-model arrangements and cross-check the geometric facts.

    By default the ambient dimensions are ``sum(d) + n - 2``, ``- 1`` and
    ``+ 0``, straddling both independence thresholds. Arrangements of random
    shape from :func:`random_arrangement` are then drawn until each
    equivalence has been checked on at least ``mixed`` of them.
    """
    if trials < 1:
        raise InvalidParameter("trials must be positive")
    dims = tuple(int(d) for d in dims)
    total = sum(dims) + len(dims)
    ambient = tuple(ambient) if ambient else (total - 2, total - 1, total)
    report = GeometryReport(dims=dims, trials=trials)
    for D in ambient:
        counts = {"D": D, "affinely_independent": 0, "origin_in_hull": 0,
                  "independent_and_origin_free": 0, "lifted_spans_independent": 0,
                  "spans_independent": 0}
        for t in range(trials):
            s = derive_seed(seed, D, t)
            subs = sample_random_model(RandomModelSpec(D, dims, 1, s))
            aff, origin, emb, lin = _check_arrangement(subs, f"random model D={D}", s,
                                                       report.violations)
            counts["affinely_independent"] += bool(aff)
            counts["origin_in_hull"] += bool(origin)
            counts["independent_and_origin_free"] += bool(aff) and not origin
            counts["lifted_spans_independent"] += bool(emb)
            counts["spans_independent"] += bool(lin)
        report.rows.append(counts)

    # keep drawing until both equivalences have been checked ``mixed`` times;
    # the span rule only applies when every subspace stays clear of the origin
    tally = {"arrangements": 0, "affinely_independent": 0, "span_rule_checked": 0,
             "spans_independent": 0}
    t = 0
    while mixed and (tally["arrangements"] < mixed or tally["span_rule_checked"] < mixed):
        s = derive_seed(seed, 10**6, t)
        t += 1
        subs, far = random_arrangement(np.random.default_rng(s))
        aff, _, _, lin = _check_arrangement(subs, "mixed", s, report.violations, check_span_rule=far)
        tally["arrangements"] += 1
        tally["affinely_independent"] += bool(aff)
        tally["span_rule_checked"] += far
        tally["spans_independent"] += bool(lin) and far
    report.mixed = tally
    return report


# --- dataset clustering ------------------------------------------------------

def run_dataset_cluster(path, method: str = "A-SSC", n: Optional[int] = None, seed: int = 0,
                        *, mode: str = "noisy", alpha: float = DEFAULT_ALPHA,
                        lam: float = DEFAULT_LAM, center: bool = False,
                        normalize: bool = False, max_iters: int = 2000, rho: float = 1.0,
                        out_dir=None) -> dict:
    """Cluster the points of a CSV file.

    ``n`` defaults to the number of label classes when labels are present.
    ``rho`` is the fixed ADMM penalty of the noisy sparse solver; values near
    ``lam`` usually converge in far fewer iterations than the default.
    Metrics are computed only when the file carries labels. With ``out_dir``
    the labels go to ``labels.csv`` and the summary to ``summary.json``.
    """
    data = load_dataset(path, center=center, normalize=normalize)
    if n is None:
        if data.labels is None:
            raise InvalidParameter("the cluster count n is required when the file has no labels")
        n = data.n_classes
    admm = ADMMParams(rho=rho, max_iters=max_iters)
    if mode == "exact":
        cfg = method_config(method, "exact", admm=admm)
    elif method.endswith("SSC"):
        cfg = method_config(method, "noisy", alpha=alpha, admm=admm)
    else:
        cfg = method_config(method, "noisy", lam=lam, admm=admm)
    coef, result, metrics = run_pipeline(data.values, data.labels, cfg, n, seed)
    summary = {"method": method, "mode": mode, "n_clusters": int(n), "points": data.count,
               "ambient_dim": data.ambient_dim, "seed": seed,
               "converged": bool(coef.converged), "iterations": coef.iterations,
               "residual": coef.residual}
    if metrics:
        summary["metrics"] = metrics
    else:
        summary["notice"] = "no labels in input; metrics omitted"
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "labels.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "cluster"])
            for j, lab in enumerate(result.labels):
                w.writerow([j, int(lab)])
        (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    summary["labels"] = result.labels
    return summary


# --- plotting --------------------------------------------------------------

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def emit_plot(result: SweepResult, metric: str, path) -> Path:
    """Write a standalone SVG of mean ``metric`` against D, one line per method.

    A method with a single D value is drawn as a marker instead of a line.
    """
    metric = metric.lower()
    if metric not in ("spr", "acc"):
        raise InvalidParameter(f"metric must be 'spr' or 'acc', got {metric!r}")
    agg = result.aggregate()
    if not agg:
        raise EmptyInput("sweep result has no rows")
    W, H = 520, 360
    left, right, top, bottom = 60, 130, 20, 50
    pw, ph = W - left - right, H - top - bottom
    Ds = [a["D"] for a in agg]
    lo, hi = min(Ds), max(Ds)
    span = max(hi - lo, 1)

    def px(D):
        return left + (pw * (D - lo) / span if hi > lo else pw / 2)

    def py(v):
        return top + ph * (1.0 - v)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#000"/>',
    ]
    for v in (0.0, 0.25, 0.5, 0.75, 1.0):
        parts.append(f'<text x="{left - 8}" y="{py(v) + 4:.1f}" text-anchor="end">{v:g}</text>')
    for D in sorted(set(Ds)):
        if hi == lo or (D - lo) % max(1, span // 10) == 0 or D == hi:
            parts.append(f'<text x="{px(D):.1f}" y="{top + ph + 16}" text-anchor="middle">{D}</text>')
    parts.append(f'<text class="xlabel" x="{left + pw / 2}" y="{H - 10}" '
                 f'text-anchor="middle">D</text>')
    parts.append(f'<text class="ylabel" x="16" y="{top + ph / 2}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {top + ph / 2})">{metric.upper()}</text>')

    methods = list(dict.fromkeys(a["method"] for a in agg))
    for i, m in enumerate(methods):
        color = _COLORS[i % len(_COLORS)]
        pts = [(a["D"], a[f"mean_{metric}"]) for a in agg if a["method"] == m]
        if len(pts) == 1:
            D, v = pts[0]
            parts.append(f'<circle cx="{px(D):.1f}" cy="{py(v):.1f}" r="4" fill="{color}"/>')
        else:
            coords = " ".join(f"{px(D):.1f},{py(v):.1f}" for D, v in pts)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                         f'stroke-width="2"/>')
        ly = top + 14 + 18 * i
        lx = left + pw + 12
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text class="legend" x="{lx + 24}" y="{ly}">{m}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
