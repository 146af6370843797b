"""Splittable, path-keyed random streams.

Every random decision in the pipeline draws from a :class:`SeedStream`
identified by ``(master_seed, path)``.  Children are derived by appending an
index to the path, so a child's sequence never depends on how much the parent
(or any sibling) has consumed.  This is what makes parallel base-clustering
generation independent of scheduling order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_U64 = (1 << 64) - 1


@dataclass
class SeedStream:
    master_seed: int
    path: tuple[int, ...] = ()
    _gen: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.master_seed) <= _U64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if any(int(i) < 0 for i in self.path):
            raise ValueError(f"path entries must be nonnegative, got {self.path}")
        self.master_seed = int(self.master_seed)
        self.path = tuple(int(i) for i in self.path)

    @property
    def generator(self) -> np.random.Generator:
        """Lazily built generator owned by this stream."""
        if self._gen is None:
            seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=self.path)
            self._gen = np.random.Generator(np.random.PCG64(seq))
        return self._gen

    def derive(self, index: int) -> SeedStream:
        return derive(self, index)


def derive(parent: SeedStream, index: int) -> SeedStream:
    """Child stream keyed by ``parent.path + (index,)``."""
    if index < 0:
        raise ValueError(f"derive index must be nonnegative, got {index}")
    return SeedStream(parent.master_seed, parent.path + (int(index),))


def uniform_int(s: SeedStream, lo: int, hi: int) -> int:
    """Uniform draw from the closed range ``[lo, hi]``."""
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    return int(s.generator.integers(lo, hi, endpoint=True))


def uniform_real(s: SeedStream, lo: float, hi: float) -> float:
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if lo == hi:
        return float(lo)
    return float(s.generator.uniform(lo, hi))


def sample_without_replacement(s: SeedStream, n: int, m: int) -> np.ndarray:
    """``m`` distinct indices from ``range(n)``."""
    if not 0 < m <= n:
        raise ValueError(f"cannot sample {m} distinct items from a population of {n}")
    return s.generator.choice(n, size=m, replace=False)
