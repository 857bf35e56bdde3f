"""Deterministic per-trajectory random streams.

Trajectory ``i`` of an ensemble gets the seed ``splitmix64(master, i)``; the
uniforms themselves come from numpy's PCG64, whose ``random()`` uses the top
53 bits of each 64-bit output. Both pieces are platform independent.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit avalanche mix."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def trajectory_seed(master_seed: int, index: int) -> int:
    """Seed of trajectory ``index``: element ``index`` of the SplitMix64 stream of ``master_seed``."""
    if index < 0:
        raise ValueError("trajectory index must be non-negative")
    return mix64((master_seed + (index + 1) * GOLDEN_GAMMA) & MASK64)


def make_generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))
