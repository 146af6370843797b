"""Synthetic multi-view Gaussian blobs with known labels.

Every informative view places the ``k`` class centers on a scaled simplex
(pairwise center distance exactly ``separation`` noise standard deviations)
and adds isotropic unit Gaussian noise before its own random rotation.
Noise views carry no class signal at all.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import MultiViewDataset, ViewMatrix
from .rng import SeedStream, derive


@dataclass(frozen=True)
class BlobConfig:
    n: int
    k: int
    n_views: int = 3
    dims: Sequence[int] | None = None  # None -> max(k, 10) per view
    separation: float = 6.0
    noise_views: int = 0
    seed: int = 0

    def view_dims(self) -> list[int]:
        if self.dims is None:
            return [max(self.k, 10)] * self.n_views
        if len(self.dims) != self.n_views:
            raise ValueError(f"expected {self.n_views} view dimensions, got {len(self.dims)}")
        return [int(d) for d in self.dims]


def _random_rotation(gen: np.random.Generator, d: int) -> np.ndarray:
    q, r = np.linalg.qr(gen.normal(size=(d, d)))
    return q * np.sign(np.diag(r))[None, :]


def make_blobs(cfg: BlobConfig) -> MultiViewDataset:
    """Balanced classes; the last ``cfg.noise_views`` views are pure noise."""
    if cfg.n < cfg.k or cfg.k < 1:
        raise ValueError(f"need 1 <= k <= n, got k={cfg.k}, n={cfg.n}")
    if not 0 <= cfg.noise_views <= cfg.n_views:
        raise ValueError("noise_views must lie in [0, n_views]")
    root = SeedStream(cfg.seed)
    labels = np.arange(cfg.n) % cfg.k
    derive(root, 0).generator.shuffle(labels)
    views = []
    for v, d in enumerate(cfg.view_dims()):
        gen = derive(root, 1 + v).generator
        noise = gen.normal(size=(cfg.n, d))
        if v >= cfg.n_views - cfg.noise_views:
            views.append(ViewMatrix(noise, name=f"noise{v}"))
            continue
        if d < cfg.k:
            raise ValueError(f"informative view {v} needs dim >= k, got {d}")
        centers = np.zeros((cfg.k, d))
        centers[np.arange(cfg.k), np.arange(cfg.k)] = cfg.separation / np.sqrt(2.0)
        x = (centers[labels] + noise) @ _random_rotation(gen, d)
        views.append(ViewMatrix(x, name=f"view{v}"))
    return MultiViewDataset(tuple(views), labels=labels)
