"""SplitMix64 random streams.

The generator is a 64-bit counter: output k of a stream seeded with s is
``mix(s + k * GAMMA)`` (mod 2**64), so any implementation with the same
constants replicates every stream used here bit for bit.

    GAMMA = 0x9E3779B97F4A7C15
    mix(z): z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
            z = (z ^ (z >> 27)) * 0x94D049BB133111EB
            return z ^ (z >> 31)

Uniform doubles take the top 53 bits; normals use Box-Muller on pairs
of uniforms.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
MASK64 = (1 << 64) - 1


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def mix64(value: int) -> int:
    """Scalar SplitMix64 finalizer."""
    return int(_mix(np.array([value & MASK64], dtype=np.uint64))[0])


class SplitMix64:
    """Deterministic stream of 64-bit values.

    Args:
        seed: Any integer; reduced mod 2**64
    """

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    @classmethod
    def derive(cls, seed: int, *keys: int) -> "SplitMix64":
        """Independent stream for a (seed, key, key, ...) tuple."""
        state = int(seed) & MASK64
        for key in keys:
            state = mix64((state + GAMMA * (int(key) + 1)) & MASK64)
        return cls(state)

    def next_u64(self, n: int) -> np.ndarray:
        with np.errstate(over="ignore"):
            counters = np.arange(1, n + 1, dtype=np.uint64) * np.uint64(GAMMA)
            counters = counters + np.uint64(self.state)
            out = _mix(counters)
        self.state = (self.state + n * GAMMA) & MASK64
        return out

    def uniform(self, size=None, low: float = 0.0, high: float = 1.0):
        shape = () if size is None else (size if isinstance(size, tuple) else (size,))
        n = int(np.prod(shape)) if shape else 1
        u = (self.next_u64(n) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
        u = low + (high - low) * u
        return float(u[0]) if size is None else u.reshape(shape)

    def normal(self, size=None, mean: float = 0.0, std: float = 1.0):
        shape = () if size is None else (size if isinstance(size, tuple) else (size,))
        n = int(np.prod(shape)) if shape else 1
        pairs = (n + 1) // 2
        u1 = self.uniform(pairs)
        u2 = self.uniform(pairs)
        radius = np.sqrt(-2.0 * np.log1p(-u1))  # 1 - u1 lies in (0, 1]
        z = np.concatenate([radius * np.cos(2 * np.pi * u2), radius * np.sin(2 * np.pi * u2)])[:n]
        z = mean + std * z
        return float(z[0]) if size is None else z.reshape(shape)

    def integers(self, low: int, high: int, size=None):
        """Integers in [low, high)."""
        span = high - low
        if span <= 0:
            raise ValueError(f"Empty range [{low}, {high})")
        u = self.uniform(size)
        out = low + np.minimum((np.asarray(u) * span).astype(np.int64), span - 1)
        return int(out) if size is None else out

    def sample_without_replacement(self, population: int, k: int) -> np.ndarray:
        """``k`` distinct indices from ``range(population)``, sorted ascending."""
        if k > population:
            raise ValueError(f"Cannot draw {k} from {population}")
        keys = self.uniform(population)
        return np.sort(np.argsort(keys, kind="stable")[:k])
