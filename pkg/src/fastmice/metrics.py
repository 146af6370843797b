"""External clustering validity: NMI, ARI, ACC and purity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray  # predicted x true

    @classmethod
    def from_labels(cls, pred, truth) -> ContingencyTable:
        pred = np.asarray(pred).ravel()
        truth = np.asarray(truth).ravel()
        if pred.size != truth.size:
            raise ValueError(f"length mismatch: {pred.size} predicted vs {truth.size} true labels")
        if pred.size == 0:
            raise ValueError("cannot score an empty labeling")
        _, p_idx = np.unique(pred, return_inverse=True)
        _, t_idx = np.unique(truth, return_inverse=True)
        counts = np.zeros((p_idx.max() + 1, t_idx.max() + 1), dtype=np.int64)
        np.add.at(counts, (p_idx.ravel(), t_idx.ravel()), 1)
        return cls(counts)

    @property
    def row_sums(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def _entropy(sizes: np.ndarray, n: int) -> float:
    p = sizes[sizes > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of the entropies."""
    t = ContingencyTable.from_labels(pred, truth)
    n = t.total
    h_pred = _entropy(t.row_sums, n)
    h_true = _entropy(t.col_sums, n)
    if h_pred == 0.0 or h_true == 0.0:
        return 1.0 if h_pred == h_true else 0.0
    nz = t.counts > 0
    pij = t.counts[nz] / n
    outer = np.outer(t.row_sums, t.col_sums)[nz] / (n * n)
    mi = float((pij * np.log(pij / outer)).sum())
    return float(np.clip(mi / np.sqrt(h_pred * h_true), 0.0, 1.0))


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def ari(pred, truth) -> float:
    """Adjusted Rand index (Hubert-Arabie).

    When the denominator vanishes (both labelings all-singletons or both a
    single cluster, or n < 2) the result is 1 for identical partitions, else 0.
    """
    t = ContingencyTable.from_labels(pred, truth)
    index = _comb2(t.counts).sum()
    a = _comb2(t.row_sums).sum()
    b = _comb2(t.col_sums).sum()
    pairs = _comb2(t.total)
    expected = a * b / pairs if pairs > 0 else 0.0
    denom = 0.5 * (a + b) - expected
    if denom == 0.0:
        identical = t.counts.shape[0] == t.counts.shape[1] == np.count_nonzero(t.counts)
        return 1.0 if identical else 0.0
    return float((index - expected) / denom)


def acc(pred, truth) -> float:
    """Best one-to-one cluster/class matching accuracy (Hungarian)."""
    t = ContingencyTable.from_labels(pred, truth)
    rows, cols = linear_sum_assignment(t.counts, maximize=True)
    return float(t.counts[rows, cols].sum() / t.total)


def purity(pred, truth) -> float:
    t = ContingencyTable.from_labels(pred, truth)
    return float(t.counts.max(axis=1).sum() / t.total)


def evaluate(pred, truth) -> dict[str, float]:
    """All four scores as percentages."""
    return {
        "nmi": 100.0 * nmi(pred, truth),
        "ari": 100.0 * ari(pred, truth),
        "acc": 100.0 * acc(pred, truth),
        "pur": 100.0 * purity(pred, truth),
    }
