"""Seeded random streams.

All randomness goes through numpy's PCG64 bit generator, seeded from a
``SeedSequence(seed, spawn_key=(stream,))``.  PCG64 output is specified
bit-for-bit, so the same ``(seed, stream)`` gives the same draws on every
platform, and independent streams can be merged in any order.
"""

from __future__ import annotations

import numpy as np

__all__ = ["make_rng", "random_subset", "random_subsets"]

_MASK64 = (1 << 64) - 1


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & _MASK64, spawn_key=(int(stream),))
    return np.random.Generator(np.random.PCG64(ss))


def random_subset(rng: np.random.Generator, n: int, k: int) -> tuple:
    """Uniform k-subset of range(n), returned sorted."""
    return tuple(sorted(int(i) for i in rng.choice(n, size=k, replace=False)))


def random_subsets(rng: np.random.Generator, n: int, k: int, count: int) -> np.ndarray:
    """``count`` independent uniform k-subsets of range(n), as a sorted (count, k) int array."""
    if k == 0:
        return np.zeros((count, 0), dtype=np.int64)
    keys = rng.random((count, n))
    idx = np.argpartition(keys, k - 1, axis=1)[:, :k] if k < n else np.tile(np.arange(n), (count, 1))
    return np.sort(idx, axis=1).astype(np.int64)
