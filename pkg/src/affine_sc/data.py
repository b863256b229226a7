"""Random affine subspace model, point sampling, and CSV datasets."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import EmptyInput, InvalidMatrix, InvalidSpec, ParseError
from .geometry import AffineSubspace, direction_subspace

# Stream keys for derive_seed; changing them changes every generated dataset.
_SUBSPACE_STREAM = 0
_POINTS_STREAM = 1


def derive_seed(master_seed: int, *keys: int) -> int:
    """Stable 64-bit child seed for ``(master_seed, *keys)``.

    Uses numpy's ``SeedSequence`` hashing with ``keys`` as the spawn key, so
    the value depends only on the arguments and never on call order.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def unit_sphere(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """``count`` columns drawn uniformly from the unit sphere of R^dim."""
    g = rng.standard_normal((dim, count))
    return g / np.linalg.norm(g, axis=0)


@dataclass(frozen=True, eq=False)
class DataMatrix:
    """D x N data with points as columns and optional labels in ``1..n``."""

    values: np.ndarray
    labels: Optional[np.ndarray] = None
    feature_names: Optional[tuple] = field(default=None, repr=False)

    def __post_init__(self):
        X = np.array(self.values, dtype=float)
        if X.ndim != 2:
            raise InvalidMatrix(f"data must be 2-D, got shape {X.shape}")
        if not np.all(np.isfinite(X)):
            raise InvalidMatrix("data has non-finite entries")
        X.setflags(write=False)
        object.__setattr__(self, "values", X)
        if self.labels is not None:
            y = np.asarray(self.labels)
            if y.shape != (X.shape[1],):
                raise InvalidMatrix(f"expected {X.shape[1]} labels, got shape {y.shape}")
            if not np.issubdtype(y.dtype, np.integer):
                if not np.all(y == np.round(y)):
                    raise InvalidMatrix("labels must be integers")
            y = y.astype(np.int64)
            present = np.unique(y)
            if y.size and not np.array_equal(present, np.arange(1, present.size + 1)):
                raise InvalidMatrix("labels must cover 1..n with every class present")
            y.setflags(write=False)
            object.__setattr__(self, "labels", y)

    @property
    def ambient_dim(self) -> int:
        return self.values.shape[0]

    @property
    def count(self) -> int:
        return self.values.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        return None if self.labels is None else int(self.labels.max(initial=0))


@dataclass(frozen=True)
class RandomModelSpec:
    """Parameters of a random union of affine subspaces."""

    ambient_dim: int
    dims: tuple
    points_per_subspace: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        if self.ambient_dim < 1:
            raise InvalidSpec("ambient_dim must be positive")
        if not self.dims:
            raise InvalidSpec("need at least one subspace")
        for d in self.dims:
            if d < 0 or d >= self.ambient_dim:
                raise InvalidSpec(f"subspace dimension {d} must lie in [0, {self.ambient_dim})")
        if self.points_per_subspace < 1:
            raise InvalidSpec("points_per_subspace must be positive")
        if not (0 <= self.seed < 2**64):
            raise InvalidSpec("seed must be a 64-bit unsigned integer")


def sample_random_model(spec: RandomModelSpec) -> list:
    """Draw one affine subspace per entry of ``spec.dims``.

    Subspace ``l`` is ``w0 + span(w1..wd)`` with every ``w`` uniform on the
    unit sphere of R^D. The raw generators are kept as the stored basis.
    """
    subspaces = []
    for ell, d in enumerate(spec.dims):
        rng = np.random.default_rng(derive_seed(spec.seed, _SUBSPACE_STREAM, ell))
        W = unit_sphere(rng, spec.ambient_dim, d + 1)
        subspaces.append(AffineSubspace(W[:, 0], W[:, 1:]))
    return subspaces


def sample_points_on_subspace(A: AffineSubspace, m: int, seed) -> np.ndarray:
    """``m`` points ``offset + Q u`` with ``u`` uniform on the unit sphere of R^d.

    ``Q`` is an orthonormal basis of the direction subspace, so every point
    sits at distance exactly one from the offset. A point subspace (d = 0)
    yields ``m`` copies of its offset.
    """
    if m < 1:
        raise InvalidSpec("m must be positive")
    if A.dim == 0:
        return np.repeat(A.offset[:, None], m, axis=1)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    Q = direction_subspace(A)
    return A.offset[:, None] + Q @ unit_sphere(rng, A.dim, m)


def generate_union_dataset(spec: RandomModelSpec):
    """Labelled points from a freshly drawn random model.

    Returns
    -------
    data : DataMatrix
        ``n * points_per_subspace`` columns, grouped by subspace, labels 1..n.
    subspaces : list of AffineSubspace
    """
    subspaces = sample_random_model(spec)
    m = spec.points_per_subspace
    blocks = []
    for ell, A in enumerate(subspaces):
        seed = derive_seed(spec.seed, _POINTS_STREAM, ell)
        blocks.append(sample_points_on_subspace(A, m, seed))
    labels = np.repeat(np.arange(1, len(subspaces) + 1), m)
    return DataMatrix(np.hstack(blocks), labels), subspaces


def _parse_float(text, line, col):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"line {line}, column {col}: non-numeric cell {text!r}",
                         row=line, cell=col) from None


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_dataset(path, *, label_column: Optional[bool] = None, center: bool = False,
                 normalize: bool = False) -> DataMatrix:
    """Read a CSV whose rows are data points.

    A first row with no numeric cells is treated as a header. A trailing
    header column named ``label`` holds integer labels; pass
    ``label_column=True`` to use the last column as labels without a header.
    Label values are remapped to ``1..n`` in sorted order.

    ``center`` subtracts the mean point, then ``normalize`` scales every point
    to unit Euclidean norm (zero points are left untouched).
    """
    text = Path(path).read_text(encoding="utf-8")
    return _parse_csv(text, label_column=label_column, center=center, normalize=normalize)


def _parse_csv(text, *, label_column=None, center=False, normalize=False):
    rows = [(i + 1, r) for i, r in enumerate(csv.reader(io.StringIO(text)))
            if any(c.strip() for c in r)]
    if not rows:
        raise EmptyInput("dataset file is empty")

    header = None
    first_line, first = rows[0]
    cells = [c.strip() for c in first]
    if not any(_is_number(c) for c in cells):
        header = cells
        rows = rows[1:]
        if not rows:
            raise EmptyInput("dataset file has a header but no data rows")

    width = len(header) if header is not None else len(rows[0][1])
    records = []
    for line, row in rows:
        if len(row) != width:
            raise ParseError(f"line {line}: expected {width} cells, found {len(row)}", row=line)
        records.append([_parse_float(c.strip(), line, j + 1) for j, c in enumerate(row)])
    M = np.asarray(records, dtype=float)

    has_labels = label_column
    if has_labels is None:
        has_labels = header is not None and header[-1].lower() == "label"
    labels = None
    names = tuple(header) if header is not None else None
    if has_labels:
        if M.shape[1] < 2:
            raise ParseError("label column present but no feature columns")
        raw = M[:, -1]
        if not np.all(raw == np.round(raw)):
            raise ParseError("label column must hold integers")
        _, labels = np.unique(raw.astype(np.int64), return_inverse=True)
        labels = labels + 1
        M = M[:, :-1]
        names = names[:-1] if names is not None else None

    X = M.T.copy()
    if center:
        X -= X.mean(axis=1, keepdims=True)
    if normalize:
        norms = np.linalg.norm(X, axis=0)
        X[:, norms > 0] /= norms[norms > 0]
    return DataMatrix(X, labels, names)


def save_dataset(data: DataMatrix, path, *, precision: int = 17) -> None:
    """Write ``data`` in the CSV layout read by :func:`load_dataset`."""
    D = data.ambient_dim
    names = list(data.feature_names) if data.feature_names else [f"x{i + 1}" for i in range(D)]
    if data.labels is not None:
        names.append("label")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for j in range(data.count):
            row = [f"{v:.{precision}g}" for v in data.values[:, j]]
            if data.labels is not None:
                row.append(str(int(data.labels[j])))
            w.writerow(row)
