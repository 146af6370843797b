"""Random view groups with per-member random feature subsampling."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import MultiViewDataset
from .rng import SeedStream, derive, sample_without_replacement, uniform_int, uniform_real


@dataclass(frozen=True)
class ViewGroupConfig:
    m_groups: int = 20
    v_min: int = 1
    v_max: int | None = None  # None means "all views"
    tau_min: float = 0.2
    tau_max: float = 0.8

    def __post_init__(self):
        if self.m_groups < 1:
            raise ValueError(f"m_groups must be positive, got {self.m_groups}")
        if self.v_min < 1:
            raise ValueError(f"v_min must be >= 1, got {self.v_min}")
        if self.v_max is not None and self.v_max < self.v_min:
            raise ValueError(f"v_max={self.v_max} is below v_min={self.v_min}")
        if not 0 < self.tau_min <= self.tau_max <= 1:
            raise ValueError(f"need 0 < tau_min <= tau_max <= 1, got [{self.tau_min}, {self.tau_max}]")

    def resolved_v_max(self, n_views: int) -> int:
        v_max = n_views if self.v_max is None else self.v_max
        if v_max > n_views:
            raise ValueError(f"v_max={v_max} exceeds the number of views V={n_views}")
        if self.v_min > v_max:
            raise ValueError(f"v_min={self.v_min} exceeds v_max={v_max}")
        return v_max


@dataclass(frozen=True)
class ViewMember:
    view_index: int
    tau: float
    features: np.ndarray  # sorted ascending, distinct

    @property
    def dim(self) -> int:
        return int(self.features.size)


@dataclass(frozen=True)
class ViewGroup:
    index: int
    members: tuple[ViewMember, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def view_indices(self) -> list[int]:
        return [m.view_index for m in self.members]


def sampled_dim(tau: float, dim: int) -> int:
    """Ceiling of ``tau * dim``, never below one feature."""
    # round() guards against float products like 0.3 * 10 = 3.0000000000000004
    return max(1, min(dim, math.ceil(round(tau * dim, 9))))


def generate_view_groups(dataset: MultiViewDataset, cfg: ViewGroupConfig,
                         s: SeedStream) -> list[ViewGroup]:
    """Draw ``cfg.m_groups`` view groups; group ``m`` uses only ``derive(s, m)``."""
    n_views = dataset.n_views
    v_max = cfg.resolved_v_max(n_views)
    dims = dataset.dims
    groups = []
    for m in range(cfg.m_groups):
        gs = derive(s, m)
        size = uniform_int(gs, cfg.v_min, v_max)
        views = np.sort(sample_without_replacement(gs, n_views, size))
        members = []
        for v in views:
            tau = uniform_real(gs, cfg.tau_min, cfg.tau_max)
            d_tilde = sampled_dim(tau, dims[v])
            feats = np.sort(sample_without_replacement(gs, dims[v], d_tilde))
            feats.setflags(write=False)
            members.append(ViewMember(int(v), tau, feats))
        groups.append(ViewGroup(m, tuple(members)))
    return groups


def member_matrix(dataset: MultiViewDataset, group: ViewGroup, member: int) -> np.ndarray:
    """The member's view restricted to its sampled feature columns (a copy)."""
    if not 0 <= member < group.size:
        raise IndexError(f"member {member} out of range for a group of {group.size}")
    vm = group.members[member]
    return dataset.views[vm.view_index].data[:, vm.features]
