"""Multi-view datasets: loading, validation and distance semantics.

On disk a dataset is a manifest of ``key = value`` lines::

    n_samples = 4
    n_views = 2
    metric = euclidean
    view.0.file = view0.csv
    view.0.dim = 2
    view.1.file = view1.coo
    view.1.dim = 3
    labels.file = labels.txt

Relative paths are resolved against the manifest's directory.  Files ending in
``.coo`` (or ``.mtx``/``.sparse``) use the sparse coordinate text format: a
header ``N d nnz`` followed by ``row col value`` lines (0-based).  Anything else
is read as a dense comma-separated matrix.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.spatial.distance import cdist

_DIRECT_DIM_LIMIT = 24


class DatasetError(ValueError):
    """Raised for malformed manifests or inconsistent view matrices."""


class DistanceMetric(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    COSINE = "cosine"

    @classmethod
    def parse(cls, value: str | DistanceMetric) -> DistanceMetric:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DatasetError(f"unknown metric {value!r}; expected euclidean or cosine") from None


SPARSE_SUFFIXES = (".coo", ".mtx", ".sparse")


@dataclass(frozen=True)
class ViewMatrix:
    data: np.ndarray
    name: str = ""

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DatasetError(f"view {self.name!r} must be a 2-D matrix, got shape {arr.shape}")
        if arr.shape[1] < 1:
            raise DatasetError(f"view {self.name!r} has no feature columns")
        if not np.all(np.isfinite(arr)):
            raise DatasetError(f"view {self.name!r} contains non-finite values")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]


@dataclass(frozen=True)
class MultiViewDataset:
    views: tuple[ViewMatrix, ...]
    metric: DistanceMetric = DistanceMetric.EUCLIDEAN
    labels: np.ndarray | None = None
    sample_ids: tuple[str, ...] | None = None
    n_samples: int = field(init=False)

    def __post_init__(self):
        views = tuple(v if isinstance(v, ViewMatrix) else ViewMatrix(v, name=f"view{i}")
                      for i, v in enumerate(self.views))
        if not views:
            raise DatasetError("a dataset needs at least one view")
        n = views[0].n_rows
        if n < 1:
            raise DatasetError("a dataset needs at least one sample")
        for i, v in enumerate(views):
            if v.n_rows != n:
                raise DatasetError(
                    f"row-count mismatch: view 0 has {n} rows but view {i} has {v.n_rows}")
        metric = DistanceMetric.parse(self.metric)
        if metric is DistanceMetric.COSINE:
            for i, v in enumerate(views):
                if np.any(np.linalg.norm(v.data, axis=1) == 0):
                    raise DatasetError(f"view {i} has a zero-norm row; cosine distance is undefined")
        labels = self.labels
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64).copy()
            if labels.shape != (n,):
                raise DatasetError(f"labels must have length {n}, got shape {labels.shape}")
            labels.setflags(write=False)
        if self.sample_ids is not None and len(self.sample_ids) != n:
            raise DatasetError(f"sample_ids must have length {n}")
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_samples", n)

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def dims(self) -> list[int]:
        return [v.dim for v in self.views]

    def standardized(self) -> MultiViewDataset:
        """Copy with every view column z-scored (constant columns become zero)."""
        out = []
        for v in self.views:
            mu = v.data.mean(axis=0)
            sd = v.data.std(axis=0)
            sd[sd == 0] = 1.0
            out.append(ViewMatrix((v.data - mu) / sd, name=v.name))
        return MultiViewDataset(tuple(out), metric=self.metric, labels=self.labels,
                                sample_ids=self.sample_ids)


# -- distances ---------------------------------------------------------------

def distance(a, b, metric: DistanceMetric | str = DistanceMetric.EUCLIDEAN) -> float:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    metric = DistanceMetric.parse(metric)
    if metric is DistanceMetric.EUCLIDEAN:
        return float(np.linalg.norm(a - b))
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine distance is undefined for a zero vector")
    return float(np.clip(1.0 - a.dot(b) / (na * nb), 0.0, 2.0))


def pairwise_distances(x: np.ndarray, y: np.ndarray, metric: DistanceMetric) -> np.ndarray:
    """Dense ``len(x) x len(y)`` distance matrix.

    Under cosine, a row whose sampled features are all zero is treated as
    orthogonal to everything (distance 1).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if metric is DistanceMetric.EUCLIDEAN:
        sq = squared_euclidean(x, y)
        return np.sqrt(sq, out=sq)
    xn = _unit_rows(x)
    yn = _unit_rows(y)
    d = 1.0 - xn @ yn.T
    zero = (np.linalg.norm(x, axis=1) == 0)[:, None] | (np.linalg.norm(y, axis=1) == 0)[None, :]
    d[zero] = 1.0
    return np.clip(d, 0.0, 2.0, out=d)


def squared_euclidean(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``||x_i - y_j||^2``.

    Low-dimensional inputs use direct differencing (exact, faster there); wide
    inputs use the BLAS norm expansion, clipped at zero.
    """
    if x.shape[1] <= _DIRECT_DIM_LIMIT:
        return cdist(x, y, "sqeuclidean")
    d = np.einsum("ij,ij->i", x, x)[:, None] - 2.0 * (x @ y.T)
    d += np.einsum("ij,ij->i", y, y)[None, :]
    np.maximum(d, 0.0, out=d)
    return d


def _unit_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return x / norms


# -- I/O ---------------------------------------------------------------------

def read_manifest(path: str | os.PathLike) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DatasetError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            entries[key] = value
    return entries


def _require_int(entries: dict[str, str], key: str, path) -> int:
    if key not in entries:
        raise DatasetError(f"{path}: missing required key {key!r}")
    try:
        value = int(entries[key])
    except ValueError:
        raise DatasetError(f"{path}: {key!r} must be an integer, got {entries[key]!r}") from None
    if value < 1:
        raise DatasetError(f"{path}: {key!r} must be positive, got {value}")
    return value


def read_matrix(path: str | os.PathLike) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"missing file: {path}")
    if path.suffix.lower() in SPARSE_SUFFIXES:
        return _read_coordinate(path)
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError as exc:
        raise DatasetError(f"{path}: could not parse CSV ({exc})") from None
    return arr


def _read_coordinate(path: Path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise DatasetError(f"{path}: sparse header must be 'N d nnz'")
        n, d, nnz = (int(t) for t in header)
        body = np.loadtxt(fh, dtype=np.float64, ndmin=2)
    if nnz == 0:
        body = np.empty((0, 3))
    if body.shape != (nnz, 3):
        raise DatasetError(f"{path}: header declares {nnz} entries, found {body.shape[0]}")
    rows = body[:, 0].astype(np.int64)
    cols = body[:, 1].astype(np.int64)
    if np.any(rows < 0) or np.any(rows >= n) or np.any(cols < 0) or np.any(cols >= d):
        raise DatasetError(f"{path}: coordinate out of range for a {n}x{d} matrix")
    out = np.zeros((n, d))
    np.add.at(out, (rows, cols), body[:, 2])
    return out


def write_matrix(path: str | os.PathLike, data: np.ndarray) -> None:
    """Write a matrix at full round-trip precision (``repr`` of each float)."""
    path = Path(path)
    data = np.asarray(data, dtype=np.float64)
    if path.suffix.lower() in SPARSE_SUFFIXES:
        rows, cols = np.nonzero(data)
        with open(path, "w") as fh:
            fh.write(f"{data.shape[0]} {data.shape[1]} {rows.size}\n")
            for r, c in zip(rows, cols):
                fh.write(f"{r} {c} {float(data[r, c])!r}\n")
        return
    with open(path, "w") as fh:
        for row in data:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_labels(path: str | os.PathLike) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DatasetError(f"missing file: {path}")
    with open(path) as fh:
        values = [int(line) for line in fh if line.strip()]
    return np.asarray(values, dtype=np.int64)


def write_labels(path: str | os.PathLike, labels: Sequence[int]) -> None:
    with open(path, "w") as fh:
        for v in np.asarray(labels, dtype=np.int64):
            fh.write(f"{v}\n")


def load_dataset(manifest_path: str | os.PathLike, standardize: bool = False) -> MultiViewDataset:
    manifest_path = Path(manifest_path)
    if not manifest_path.exists():
        raise DatasetError(f"missing file: {manifest_path}")
    entries = read_manifest(manifest_path)
    base = manifest_path.parent
    n = _require_int(entries, "n_samples", manifest_path)
    n_views = _require_int(entries, "n_views", manifest_path)
    views = []
    for i in range(n_views):
        fkey = f"view.{i}.file"
        if fkey not in entries:
            raise DatasetError(f"{manifest_path}: missing required key {fkey!r}")
        dim = _require_int(entries, f"view.{i}.dim", manifest_path)
        data = read_matrix(base / entries[fkey])
        if data.shape[0] != n:
            raise DatasetError(
                f"row-count mismatch: view {i} has {data.shape[0]} rows, manifest declares n_samples={n}")
        if data.shape[1] != dim:
            raise DatasetError(
                f"dimension mismatch: view {i} has {data.shape[1]} columns, manifest declares {dim}")
        name = entries.get(f"view.{i}.name", Path(entries[fkey]).stem)
        views.append(ViewMatrix(data, name=name))
    labels = None
    if "labels.file" in entries:
        labels = read_labels(base / entries["labels.file"])
    metric = DistanceMetric.parse(entries.get("metric", "euclidean"))
    ds = MultiViewDataset(tuple(views), metric=metric, labels=labels)
    return ds.standardized() if standardize else ds


def write_dataset(dataset: MultiViewDataset, directory: str | os.PathLike,
                  sparse_views: Sequence[int] = ()) -> Path:
    """Write views and labels plus a manifest into ``directory``; return the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    lines = [f"n_samples = {dataset.n_samples}", f"n_views = {dataset.n_views}",
             f"metric = {dataset.metric.value}"]
    for i, v in enumerate(dataset.views):
        fname = f"view{i}.coo" if i in sparse_views else f"view{i}.csv"
        write_matrix(directory / fname, v.data)
        lines += [f"view.{i}.file = {fname}", f"view.{i}.dim = {v.dim}"]
        if v.name:
            lines.append(f"view.{i}.name = {v.name}")
    if dataset.labels is not None:
        write_labels(directory / "labels.txt", dataset.labels)
        lines.append("labels.file = labels.txt")
    manifest = directory / "manifest.txt"
    manifest.write_text("\n".join(lines) + "\n")
    return manifest
