"""Deterministic counter-mode pseudo-random streams.

The generator is SplitMix64 evaluated in counter mode: output ``i`` of a
stream with 64-bit key ``k`` is ``mix(k + (i+1)*GAMMA)`` where ``mix`` is
the SplitMix64 finalizer and GAMMA the golden-ratio increment. The whole
construction is integer-only, so raw and uniform draws are bit-identical
across platforms and across the numba/numpy kernel paths; derived
Gaussians additionally depend on the platform's transcendental functions.

Sub-streams are derived with :func:`derive_key`, which is the documented
"seed xor mixed-index" rule used for per-drop channel seeds.
"""

import math

import numpy as np

from .accel import fill_u64
from .errors import ContractError

MASK64 = 0xFFFFFFFFFFFFFFFF
GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 2.0 ** -53


def mix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer (pure Python, exact)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_key(seed: int, index: int) -> int:
    """Key for sub-stream ``index`` of ``seed``: mix64(seed ^ mix64((index+1)*GAMMA))."""
    if index < 0:
        raise ContractError(f"stream index must be >= 0, got {index}")
    return mix64((seed & MASK64) ^ mix64(((index + 1) * GAMMA) & MASK64))


class RandomStream:
    """Sequential view of one SplitMix64 counter stream.

    Every draw method consumes a documented number of raw 64-bit words,
    so replaying a stream from the same key reproduces it exactly.
    """

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw uint64 words."""
        if n < 0:
            raise ContractError(f"draw count must be >= 0, got {n}")
        out = fill_u64(np.uint64(self.key), np.uint64(self.counter), n)
        self.counter += n
        return out

    def uniform(self, n: int) -> np.ndarray:
        """Uniform doubles in (0, 1], one raw word each."""
        bits = self.raw(n) >> np.uint64(11)
        return (bits.astype(np.float64) + 1.0) * _INV_2_53

    def normal(self, n: int) -> np.ndarray:
        """Standard normals via Box-Muller; consumes 2*ceil(n/2) raw words."""
        pairs = (n + 1) // 2
        u1 = self.uniform(pairs)
        u2 = self.uniform(pairs)
        r = np.sqrt(-2.0 * np.log(u1))
        ang = (2.0 * math.pi) * u2
        out = np.concatenate([r * np.cos(ang), r * np.sin(ang)])
        return out[:n]

    def complex_normal(self, n: int) -> np.ndarray:
        """Circular complex normals with E|z|^2 = 1; consumes 2n raw words."""
        u1 = self.uniform(n)
        u2 = self.uniform(n)
        r = np.sqrt(-np.log(u1))
        return r * np.exp((2j * math.pi) * u2)

    def exponential(self, n: int, scale: float) -> np.ndarray:
        """Exponential variates with the given scale; consumes n raw words."""
        return -scale * np.log(self.uniform(n))

    def laplace(self, n: int, scale: float) -> np.ndarray:
        """Zero-mean Laplacian variates; consumes n raw words."""
        u = self.uniform(n) - 0.5
        if scale == 0.0:
            return np.zeros(n)
        # uniform() can hit 1.0 exactly; keep |u| strictly below 0.5
        t = np.minimum(np.abs(u), np.nextafter(0.5, 0.0))
        return -scale * np.sign(u) * np.log1p(-2.0 * t)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n); consumes max(n-1, 0) raw words."""
        perm = np.arange(n, dtype=np.int64)
        if n < 2:
            return perm
        words = self.raw(n - 1)
        for i in range(n - 1, 0, -1):
            j = int(words[n - 1 - i] % np.uint64(i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm
