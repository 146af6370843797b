"""Lloyd k-means with k-means++ seeding and farthest-point reseeding.

The same engine picks anchors and discretizes every spectral embedding,
including the final consensus one.  Distances are always squared Euclidean.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dataset import squared_euclidean
from .rng import SeedStream, derive


class KMeansInit(str, enum.Enum):
    KMEANSPP = "kmeanspp"
    RANDOM = "random"


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 100
    tol: float = 1e-6
    restarts: int = 1
    init: KMeansInit = KMeansInit.KMEANSPP
    empty_cluster_policy: str = "reseed_farthest"

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        if self.empty_cluster_policy != "reseed_farthest":
            raise ValueError(f"unsupported empty_cluster_policy {self.empty_cluster_policy!r}")
        object.__setattr__(self, "init", KMeansInit(self.init))

    def with_k(self, k: int) -> KMeansConfig:
        return KMeansConfig(k, self.max_iters, self.tol, self.restarts, self.init,
                            self.empty_cluster_policy)


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    iterations_run: int
    inertia_history: list[float] = field(default_factory=list)


def assign(data: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Nearest center per row; ties go to the lower center index."""
    return _assign(np.asarray(data, dtype=np.float64), np.asarray(centers, dtype=np.float64))[0]


_CHUNK = 256


def _assign(data, centers):
    # the argmin only needs |c|^2 - 2 x.c; the winning distance is recomputed exactly
    n = data.shape[0]
    labels = np.empty(n, dtype=np.int64)
    c_sq = np.einsum("ij,ij->i", centers, centers)
    ct = np.ascontiguousarray(centers.T)
    for start in range(0, n, _CHUNK):
        stop = min(start + _CHUNK, n)
        d = data[start:stop] @ ct
        d *= -2.0
        d += c_sq
        labels[start:stop] = d.argmin(axis=1)
    diff = data - centers[labels]
    mind = np.einsum("ij,ij->i", diff, diff)
    return labels, mind


def _init_kmeanspp(data, k, gen):
    n = data.shape[0]
    centers = np.empty((k, data.shape[1]))
    first = int(gen.integers(n))
    centers[0] = data[first]
    closest = squared_euclidean(data, centers[:1]).ravel()
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            idx = int(gen.integers(n))
        else:
            r = gen.random() * total
            idx = int(np.searchsorted(np.cumsum(closest), r, side="right"))
            idx = min(idx, n - 1)
        centers[j] = data[idx]
        np.minimum(closest, squared_euclidean(data, centers[j:j + 1]).ravel(), out=closest)
    return centers


def _reseed_empty(data, labels, centers, mind, k):
    counts = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return labels, centers, mind
    labels = labels.copy()
    centers = centers.copy()
    mind = mind.copy()
    for j in empty:
        # farthest point among clusters that can spare a member
        movable = counts[labels] > 1
        cand = np.where(movable, mind, -1.0)
        i = int(np.argmax(cand))
        counts[labels[i]] -= 1
        labels[i] = j
        counts[j] = 1
        centers[j] = data[i]
        mind[i] = 0.0
    return labels, centers, mind


def _update(data, labels, k):
    sums = np.column_stack([np.bincount(labels, weights=col, minlength=k) for col in data.T])
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return sums / counts[:, None]


def _lloyd(data, cfg: KMeansConfig, gen) -> KMeansResult:
    n = data.shape[0]
    k = cfg.k
    if cfg.init is KMeansInit.KMEANSPP:
        centers = _init_kmeanspp(data, k, gen)
    else:
        centers = data[gen.choice(n, size=k, replace=False)].copy()

    history: list[float] = []
    prev = np.inf
    labels = None
    for it in range(1, cfg.max_iters + 1):
        labels, mind = _assign(data, centers)
        labels, centers, mind = _reseed_empty(data, labels, centers, mind, k)
        inertia = float(mind.sum())
        history.append(inertia)
        if inertia == 0.0 or (np.isfinite(prev) and prev - inertia <= cfg.tol * prev):
            break
        prev = inertia
        if it == cfg.max_iters:
            break
        centers = _update(data, labels, k)
    return KMeansResult(labels, centers, history[-1], len(history), history)


def kmeans(data: np.ndarray, cfg: KMeansConfig, s: SeedStream) -> KMeansResult:
    """Cluster the rows of ``data``; with restarts, the lowest inertia wins.

    Restart ``r`` draws from ``derive(s, r)``, so results are fully determined
    by the stream.  Every returned cluster is nonempty.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise ValueError("data must be a 2-D matrix")
    n = data.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of points n={n}")
    if not np.all(np.isfinite(data)):
        raise ValueError("data contains non-finite values")
    best = None
    for r in range(cfg.restarts):
        gen = derive(s, r).generator
        res = _lloyd(data, cfg, gen)
        if best is None or res.inertia < best.inertia:
            best = res
    return best
