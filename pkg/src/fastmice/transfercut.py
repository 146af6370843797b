"""Bipartite graph partitioning through the anchor-side reduced eigenproblem.

For a cross-affinity ``B`` (``N x P``) with row sums ``D_hat``, the spectral
problem of the full ``(N+P)``-node bipartite graph is solved on the ``P x P``
graph ``E_s = B^T D_hat^{-1} B``.  Each reduced pair ``(delta, u)`` maps back to
a full-graph pair through ``lambda (2 - lambda) = delta`` and
``h = D_hat^{-1} B u / (1 - lambda)``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse as sp

from .graph import DegenerateSampleError
from .kmeans import KMeansConfig, kmeans
from .rng import SeedStream

log = logging.getLogger(__name__)

DELTA_CEILING = 1.0 - 1e-12
LIFT_FLOOR = 1e-12


@dataclass(frozen=True)
class ReducedGraph:
    e_s: np.ndarray
    d_s: np.ndarray
    row_degrees: np.ndarray
    kept_columns: np.ndarray
    n_columns: int

    @property
    def size(self) -> int:
        return self.e_s.shape[0]


@dataclass
class EigenSystem:
    deltas: np.ndarray
    u_vectors: np.ndarray
    lambdas: np.ndarray | None = None
    h_vectors: np.ndarray | None = None

    @property
    def n_pairs(self) -> int:
        return self.deltas.size


def reduce(b: sp.spmatrix) -> ReducedGraph:
    b = sp.csr_matrix(b, dtype=np.float64)
    row_degrees = np.asarray(b.sum(axis=1)).ravel()
    empty = np.flatnonzero(np.diff(b.indptr) == 0)
    if empty.size:
        raise DegenerateSampleError(f"row {int(empty[0])} of the cross-affinity has no entries")
    if np.any(row_degrees <= 0):
        raise DegenerateSampleError("cross-affinity rows must have positive sums")
    col_degrees = np.asarray(b.sum(axis=0)).ravel()
    kept = np.flatnonzero(col_degrees > 0)
    if kept.size < b.shape[1]:
        b = b[:, kept]
    scaled = sp.diags(1.0 / row_degrees) @ b
    e_s = (b.T @ scaled).toarray()
    e_s = 0.5 * (e_s + e_s.T)
    d_s = e_s.sum(axis=1)
    return ReducedGraph(e_s, d_s, row_degrees, kept, int(col_degrees.size))


def solve_reduced(g: ReducedGraph, k: int) -> EigenSystem:
    """Smallest ``k`` pairs of ``L_s u = delta D_s u``, ``D_s``-orthonormal."""
    p = g.size
    if not 1 <= k <= p:
        raise ValueError(f"k={k} must lie in [1, P={p}]")
    if not np.all(np.isfinite(g.e_s)):
        raise ValueError("reduced affinity contains non-finite values")
    inv_sqrt = 1.0 / np.sqrt(g.d_s)
    normalized = g.e_s * inv_sqrt[:, None] * inv_sqrt[None, :]
    mu, w = la.eigh(normalized, subset_by_index=[p - k, p - 1])
    order = np.argsort(-mu, kind="stable")
    mu, w = mu[order], w[:, order]
    deltas = np.clip(1.0 - mu, 0.0, None)
    u = w * inv_sqrt[:, None]
    return EigenSystem(deltas, u)


def lift(system: EigenSystem, b: sp.spmatrix, g: ReducedGraph) -> EigenSystem:
    """Map reduced pairs to sample-side eigenvectors; pairs with delta near 1 are dropped."""
    b = sp.csr_matrix(b, dtype=np.float64)
    if g.kept_columns.size < b.shape[1]:
        b = b[:, g.kept_columns]
    keep = system.deltas < DELTA_CEILING
    if not np.all(keep):
        log.warning("discarding %d eigenpair(s) with delta >= 1", int((~keep).sum()))
    deltas = system.deltas[keep]
    u = system.u_vectors[:, keep]
    lambdas = 1.0 - np.sqrt(1.0 - deltas)
    scale = 1.0 / np.maximum(1.0 - lambdas, LIFT_FLOOR)
    h = (b @ u) / g.row_degrees[:, None] * scale[None, :]
    return EigenSystem(deltas, u, lambdas, h)


def spectral_embedding(b: sp.spmatrix, k: int) -> tuple[np.ndarray, EigenSystem]:
    """Row-normalized ``N x k`` embedding; missing pairs become zero columns."""
    g = reduce(b)
    if k > g.size:
        raise ValueError(f"k={k} exceeds the {g.size} positive-degree columns")
    system = lift(solve_reduced(g, k), b, g)
    h = system.h_vectors
    if h.shape[1] < k:
        log.warning("only %d of %d eigenpairs are usable; padding the embedding with zeros",
                    h.shape[1], k)
        h = np.hstack([h, np.zeros((h.shape[0], k - h.shape[1]))])
    norms = np.linalg.norm(h, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    return h / norms, system


def partition(b: sp.spmatrix, k: int, kmeans_cfg: KMeansConfig | None, s: SeedStream) -> np.ndarray:
    """Partition the samples of a bipartite graph into ``k`` clusters."""
    if k == 1:
        return np.zeros(b.shape[0], dtype=np.int64)
    cfg = KMeansConfig(k) if kmeans_cfg is None else kmeans_cfg.with_k(k)
    emb, _ = spectral_embedding(b, k)
    return kmeans(emb, cfg, s).labels
