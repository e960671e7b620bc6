"""Deterministic random streams.

All randomness in the package flows through :class:`SeededStream`, which wraps
numpy's PCG64 bit generator and only consumes its raw 64-bit output. Derived
quantities (uniform doubles, bounded integers, Gaussians) are computed here so
that outputs do not depend on numpy's ``Generator`` method implementations.
"""
from __future__ import annotations

import math

import numpy as np

_TWO_POW_53 = float(1 << 53)


class SeededStream:
    """A reproducible stream of random draws keyed by ``(seed, *key)``."""

    def __init__(self, seed: int, *key: int) -> None:
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.seed = int(seed)
        self.key = tuple(int(k) for k in key)
        ss = np.random.SeedSequence([self.seed, *self.key])
        self._bits = np.random.PCG64(ss)
        self._spare: float | None = None

    def child(self, *key: int) -> "SeededStream":
        """Independent stream for a sub-task, e.g. one sample of a dataset."""
        return SeededStream(self.seed, *self.key, *key)

    def raw(self) -> int:
        return int(self._bits.random_raw())

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.raw() >> 11) / _TWO_POW_53

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection sampling (no modulo bias)."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.raw()
            if x < limit:
                return x % n

    def normal(self) -> float:
        """Standard Gaussian via the Box-Muller transform."""
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self.uniform()  # in (0, 1]
        u2 = self.uniform()
        r = math.sqrt(-2.0 * math.log(u1))
        theta = 2.0 * math.pi * u2
        self._spare = r * math.sin(theta)
        return r * math.cos(theta)

    def normals(self, n: int) -> list[float]:
        return [self.normal() for _ in range(n)]
