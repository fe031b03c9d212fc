"""Seeded, counter-based random number generation.

The whole toolkit draws its randomness from SplitMix64, a named 64-bit
counter-based generator: the state advances by a fixed odd constant and the
output is a finalizer hash of the counter.  This makes every stream a pure
function of its seed, bit-identical across platforms, processes and thread
counts.  Independent streams are obtained with :func:`derive_seed`.
"""

from __future__ import annotations

import numpy as np

from . import _kernels

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, *parts: int) -> int:
    """Fold integer labels into a base seed, giving a decorrelated child seed.

    Used to carve independent, order-insensitive streams out of a single
    user-facing seed (e.g. one stream per Monte Carlo replication).
    """
    h = (int(base) & _MASK64) or 1
    for p in parts:
        h = _mix((h + _GOLDEN) & _MASK64) ^ _mix((int(p) + 1) & _MASK64)
        h &= _MASK64
    return _mix((h + _GOLDEN) & _MASK64)


class Rng:
    """SplitMix64 stream with the handful of draws the toolkit needs."""

    def __init__(self, seed: int):
        self._state = np.uint64(int(seed) & _MASK64)
        self.seed = int(seed)

    def u64(self) -> int:
        out, self._state = _kernels.next_u64(self._state)
        return int(out)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u, self._state = _kernels.next_uniform(self._state)
        return low + (high - low) * u

    def randbelow(self, n: int) -> int:
        """Unbiased integer in [0, n) by rejection on the top of the range."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.u64()
            if u < limit:
                return u % n

    def poisson(self, lam: float) -> int:
        """Poisson draw; inversion for lam < 10, transformed rejection above."""
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"Poisson intensity must be finite and >= 0, got {lam}")
        k, self._state = _kernels.poisson_draw(float(lam), self._state)
        return int(k)

    def poissons(self, lam: float, size: int) -> np.ndarray:
        """Vector of ``size`` independent Poisson draws with mean ``lam``."""
        if not np.isfinite(lam) or lam < 0:
            raise ValueError(f"Poisson intensity must be finite and >= 0, got {lam}")
        out, self._state = _kernels.poisson_fill(float(lam), int(size), self._state)
        return out

    def spawn(self, *parts: int) -> "Rng":
        return Rng(derive_seed(self.seed, *parts))
