"""Anchor selection and approximate nearest-anchor search.

Anchors for a view member come from a hybrid selection: a random candidate
pool of ``CANDIDATE_FACTOR * p_bar`` samples is reduced to ``p_bar`` k-means
centers.  A coarse index (k-means over the anchors themselves, about
``sqrt(p_bar)`` groups) then answers k-nearest-anchor queries by scanning the
closest few coarse groups only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import DistanceMetric, pairwise_distances
from .kmeans import KMeansConfig, kmeans
from .rng import SeedStream, derive, sample_without_replacement

CANDIDATE_FACTOR = 10
ANCHOR_ITERS = 20
EXACT_LIMIT = 25
N_PROBE = 6


@dataclass(frozen=True)
class AnchorBudget:
    p_total: int
    k_total: int
    group_size: int
    n_samples: int

    def __post_init__(self):
        if min(self.p_total, self.k_total, self.group_size, self.n_samples) < 1:
            raise ValueError("anchor budget parameters must be positive")

    @property
    def p_bar(self) -> int:
        return min(math.ceil(self.p_total / self.group_size), self.n_samples)

    @property
    def k_bar(self) -> int:
        return min(math.ceil(self.k_total / self.group_size), self.p_bar)


@dataclass(frozen=True)
class AnchorSet:
    centers: np.ndarray
    group_centroids: np.ndarray
    groups: tuple[np.ndarray, ...]  # anchor indices per coarse group, ascending

    @property
    def size(self) -> int:
        return self.centers.shape[0]

    @property
    def n_groups(self) -> int:
        return len(self.groups)


def _prepare(x: np.ndarray, metric: DistanceMetric) -> np.ndarray:
    if metric is DistanceMetric.COSINE:
        norms = np.linalg.norm(x, axis=1, keepdims=True)
        norms[norms == 0] = 1.0
        return x / norms
    return x


def build_index(centers: np.ndarray, s: SeedStream,
                metric: DistanceMetric = DistanceMetric.EUCLIDEAN) -> AnchorSet:
    """Coarse search index over fixed anchor rows."""
    centers = np.ascontiguousarray(centers, dtype=np.float64)
    p = centers.shape[0]
    if p <= EXACT_LIMIT:
        groups = (np.arange(p),)
        centroids = centers.mean(axis=0, keepdims=True)
    else:
        g = math.ceil(math.sqrt(p))
        res = kmeans(_prepare(centers, metric), KMeansConfig(g, max_iters=ANCHOR_ITERS), s)
        groups = tuple(np.flatnonzero(res.labels == j) for j in range(g))
        centroids = res.centers
    centers.setflags(write=False)
    return AnchorSet(centers, centroids, groups)


def select_anchors(member_data: np.ndarray, p_bar: int, metric: DistanceMetric | str,
                   s: SeedStream) -> AnchorSet:
    metric = DistanceMetric(metric)
    member_data = np.asarray(member_data, dtype=np.float64)
    n = member_data.shape[0]
    if not 1 <= p_bar <= n:
        raise ValueError(f"p_bar={p_bar} must lie in [1, N={n}]")
    n_cand = min(CANDIDATE_FACTOR * p_bar, n)
    if n_cand == n:
        cand = member_data
    else:
        idx = np.sort(sample_without_replacement(derive(s, 0), n, n_cand))
        cand = member_data[idx]
    cand = _prepare(cand, metric)
    res = kmeans(cand, KMeansConfig(p_bar, max_iters=ANCHOR_ITERS), derive(s, 1))
    centers = res.centers
    if metric is DistanceMetric.COSINE:
        centers = _prepare(centers, metric)
    return build_index(centers, derive(s, 2), metric)


def nearest_anchors(query, anchors: AnchorSet, k_bar: int,
                    metric: DistanceMetric | str = DistanceMetric.EUCLIDEAN) -> list[tuple[int, float]]:
    """Approximate ``k_bar`` nearest anchors of one query, nearest first."""
    q = np.asarray(query, dtype=np.float64).reshape(1, -1)
    idx, dist = nearest_anchors_batch(q, anchors, k_bar, metric)
    return [(int(i), float(d)) for i, d in zip(idx[0], dist[0])]


def nearest_anchors_batch(queries: np.ndarray, anchors: AnchorSet, k_bar: int,
                          metric: DistanceMetric | str = DistanceMetric.EUCLIDEAN,
                          n_probe: int = N_PROBE):
    """Row-wise :func:`nearest_anchors` returning ``(indices, distances)``, both ``n x k_bar``.

    Each query scans its ``n_probe`` nearest coarse groups, continuing to
    further groups until they hold at least ``k_bar`` anchors, and ranks the
    union exactly.  Work is organised per coarse group so that every distance
    block is one dense call.
    """
    metric = DistanceMetric(metric)
    p = anchors.size
    if not 1 <= k_bar <= p:
        raise ValueError(f"k_bar={k_bar} must lie in [1, {p}]")
    queries = np.asarray(queries, dtype=np.float64)
    n = queries.shape[0]

    if anchors.n_groups == 1:
        cand = anchors.groups[0]
        d = pairwise_distances(queries, anchors.centers[cand], metric)
        return _top_k(d, np.broadcast_to(cand, d.shape), k_bar)

    sizes = np.array([g.size for g in anchors.groups])
    probe_q = _prepare(queries, metric) if metric is DistanceMetric.COSINE else queries
    coarse = pairwise_distances(probe_q, anchors.group_centroids, DistanceMetric.EUCLIDEAN)
    order = np.argsort(coarse, axis=1, kind="stable")
    covered = np.cumsum(sizes[order], axis=1)
    depth = np.maximum((covered < k_bar).sum(axis=1) + 1, min(n_probe, anchors.n_groups))
    width = int(covered[np.arange(n), depth - 1].max())
    offsets = np.zeros_like(covered)
    offsets[:, 1:] = covered[:, :-1]

    dist = np.full((n, width), np.inf)
    cand = np.full((n, width), p, dtype=np.int64)  # p marks an unused slot
    rows_all, ranks_all = np.nonzero(np.arange(order.shape[1])[None, :] < depth[:, None])
    gids = order[rows_all, ranks_all]
    by_group = np.argsort(gids, kind="stable")
    bounds = np.searchsorted(gids[by_group], np.arange(anchors.n_groups + 1))
    for g, members in enumerate(anchors.groups):
        sel = by_group[bounds[g]:bounds[g + 1]]
        if sel.size == 0:
            continue
        rows, ranks = rows_all[sel], ranks_all[sel]
        slots = offsets[rows, ranks][:, None] + np.arange(members.size)[None, :]
        dist[rows[:, None], slots] = pairwise_distances(queries[rows], anchors.centers[members], metric)
        cand[rows[:, None], slots] = members[None, :]
    return _top_k(dist, cand, k_bar)


def _top_k(dist, cand, k_bar):
    """Smallest ``k_bar`` per row, ordered by distance then anchor index."""
    cand = np.ascontiguousarray(cand)
    if k_bar < dist.shape[1]:
        part = np.argpartition(dist, k_bar - 1, axis=1)[:, :k_bar]
    else:
        part = np.broadcast_to(np.arange(dist.shape[1]), dist.shape).copy()
    d = np.take_along_axis(dist, part, axis=1)
    c = np.take_along_axis(cand, part, axis=1)
    # rows with a tie straddling the k-th place need the full ordering
    kth = d.max(axis=1)
    tied = np.flatnonzero((dist <= kth[:, None]).sum(axis=1) > k_bar)
    if tied.size:
        full = np.lexsort((cand[tied], dist[tied]), axis=-1)[:, :k_bar]
        d[tied] = np.take_along_axis(dist[tied], full, axis=1)
        c[tied] = np.take_along_axis(cand[tied], full, axis=1)
    order = np.lexsort((c, d), axis=-1)
    return np.take_along_axis(c, order, axis=1), np.take_along_axis(d, order, axis=1)
