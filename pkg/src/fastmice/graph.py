"""Sample-to-anchor bipartite graphs.

Cross-affinity matrices are ``scipy.sparse.csr_matrix`` objects with sorted
column indices, no duplicates and strictly positive stored values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .anchors import AnchorSet, nearest_anchors_batch
from .dataset import DistanceMetric

# smallest positive normal double; keeps far-tail kernel values stored
_TINY = np.finfo(np.float64).tiny


class DegenerateSampleError(ValueError):
    """A sample has no edges in a bipartite graph."""


@dataclass(frozen=True)
class ViewSharingGraph:
    group_index: int
    affinity: sp.csr_matrix
    column_offsets: tuple[int, ...]

    @property
    def anchor_count(self) -> int:
        return self.affinity.shape[1]

    @property
    def nnz(self) -> int:
        return int(self.affinity.nnz)


def csr_from_neighbors(indices: np.ndarray, values: np.ndarray, n_cols: int) -> sp.csr_matrix:
    """CSR matrix with row ``i`` holding ``values[i]`` at columns ``indices[i]``."""
    n, k = indices.shape
    order = np.argsort(indices, axis=1, kind="stable")
    cols = np.take_along_axis(indices, order, axis=1).ravel()
    vals = np.take_along_axis(values, order, axis=1).ravel()
    indptr = np.arange(0, n * k + 1, k, dtype=np.int64)
    return sp.csr_matrix((vals, cols, indptr), shape=(n, n_cols))


def gaussian_affinity(dist: np.ndarray) -> np.ndarray:
    """Gaussian kernel with bandwidth equal to the mean of ``dist``."""
    sigma = float(dist.mean()) if dist.size else 0.0
    if sigma == 0.0:
        return np.ones_like(dist)
    vals = np.exp(-(dist * dist) / (2.0 * sigma * sigma))
    return np.maximum(vals, _TINY)


def build_subgraph(member_data: np.ndarray, anchors: AnchorSet, k_bar: int,
                   metric: DistanceMetric | str = DistanceMetric.EUCLIDEAN) -> sp.csr_matrix:
    """``N x p_bar`` affinity linking each sample to its ``k_bar`` nearest anchors."""
    idx, dist = nearest_anchors_batch(member_data, anchors, k_bar, metric)
    return csr_from_neighbors(idx, gaussian_affinity(dist), anchors.size)


def normalize_rows(b: sp.csr_matrix) -> sp.csr_matrix:
    """Scale every row to unit Euclidean norm."""
    b = sp.csr_matrix(b, dtype=np.float64, copy=True)
    counts = np.diff(b.indptr)
    if np.any(counts == 0):
        raise DegenerateSampleError(f"row {int(np.flatnonzero(counts == 0)[0])} has no entries")
    # divide by the row maximum first so tiny rows cannot underflow to zero norm
    b.data /= np.repeat(np.maximum.reduceat(b.data, b.indptr[:-1]), counts)
    norms = np.sqrt(np.add.reduceat(b.data * b.data, b.indptr[:-1]))
    b.data /= np.repeat(norms, counts)
    return b


def assemble_view_sharing(subgraphs: Sequence[sp.csr_matrix], group_index: int = 0) -> ViewSharingGraph:
    if not subgraphs:
        raise ValueError("need at least one sub-graph")
    n = subgraphs[0].shape[0]
    for i, b in enumerate(subgraphs):
        if b.shape[0] != n:
            raise ValueError(f"row-count mismatch: sub-graph 0 has {n} rows, sub-graph {i} has {b.shape[0]}")
    offsets = tuple(int(o) for o in np.cumsum([0] + [b.shape[1] for b in subgraphs[:-1]]))
    affinity = sp.hstack(subgraphs, format="csr")
    affinity.sort_indices()
    return ViewSharingGraph(group_index, affinity, offsets)


def write_coordinate(path, b: sp.spmatrix) -> None:
    """Dump a sparse matrix as ``N d nnz`` header plus ``row col value`` lines."""
    coo = sp.coo_matrix(b)
    with open(path, "w") as fh:
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write(f"{r} {c} {float(v)!r}\n")
