"""Late-stage fusion of base clusterings via the sample-cluster bipartite graph."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .kmeans import KMeansConfig
from .rng import SeedStream
from .transfercut import partition

FINAL_RESTARTS = 3


@dataclass(frozen=True)
class BaseClustering:
    group_index: int
    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise ValueError("labels must be a vector")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_clusters):
            raise ValueError(
                f"base clustering {self.group_index}: labels must lie in [0, {self.n_clusters})")
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class Ensemble:
    members: tuple[BaseClustering, ...]
    cluster_offsets: tuple[int, ...] = field(init=False)
    k_c: int = field(init=False)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("an ensemble needs at least one base clustering")
        n = members[0].labels.size
        for m in members:
            if m.labels.size != n:
                raise ValueError(
                    f"base clustering {m.group_index} has {m.labels.size} labels, expected {n}")
        sizes = [m.n_clusters for m in members]
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "cluster_offsets", tuple(int(o) for o in np.cumsum([0] + sizes[:-1])))
        object.__setattr__(self, "k_c", int(sum(sizes)))

    @classmethod
    def from_labels(cls, label_vectors: Sequence, n_clusters: Sequence[int] | None = None) -> Ensemble:
        members = []
        for m, lab in enumerate(label_vectors):
            lab = np.asarray(lab, dtype=np.int64)
            k = int(lab.max()) + 1 if n_clusters is None else int(n_clusters[m])
            members.append(BaseClustering(m, lab, k))
        return cls(tuple(members))

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def n_samples(self) -> int:
        return self.members[0].labels.size


def build_consensus_graph(e: Ensemble) -> sp.csr_matrix:
    """Binary ``N x k_c`` incidence of samples and base clusters (``M`` ones per row)."""
    n, m = e.n_samples, e.size
    cols = np.column_stack([mem.labels + off for mem, off in zip(e.members, e.cluster_offsets)])
    data = np.ones(n * m)
    indptr = np.arange(0, n * m + 1, m, dtype=np.int64)
    b = sp.csr_matrix((data, cols.ravel(), indptr), shape=(n, e.k_c))
    b.sort_indices()
    return b


def consensus_partition(e: Ensemble, k: int, kmeans_cfg: KMeansConfig | None,
                        s: SeedStream) -> np.ndarray:
    b = build_consensus_graph(e)
    nonempty = int(np.count_nonzero(np.asarray(b.sum(axis=0)).ravel()))
    if k > nonempty:
        raise ValueError(f"k={k} exceeds the {nonempty} nonempty clusters in the ensemble")
    base = KMeansConfig(k, restarts=FINAL_RESTARTS) if kmeans_cfg is None else kmeans_cfg
    cfg = KMeansConfig(k, base.max_iters, base.tol, FINAL_RESTARTS, base.init)
    return partition(b, k, cfg, s)


def write_ensemble(path, e: Ensemble) -> None:
    """One line per sample, one whitespace-separated column per base clustering."""
    mat = np.column_stack([m.labels for m in e.members])
    np.savetxt(path, mat, fmt="%d")
