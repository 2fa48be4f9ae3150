"""Cross-polarized panel geometry and the oversampled 2D DFT beam grid.

Beam indexing is row-major over (theta1, theta2) with theta2 fastest,
matching the Kronecker order horizontal-(x)-vertical, so beam positions
are reproducible across the codebook modules.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigError, ContractError


@dataclass(frozen=True)
class ArrayConfig:
    """Panel with n1 x n2 dual-polarized ports and (o1, o2) oversampling."""

    n1: int
    n2: int
    o1: int
    o2: int
    nr: int

    def __post_init__(self):
        for name in ("n1", "n2", "o1", "o2", "nr"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")

    @property
    def nt(self) -> int:
        """Transmit port count: two polarizations per (n1, n2) position."""
        return 2 * self.n1 * self.n2

    @property
    def n_ports(self) -> int:
        """Ports of a single polarization (beam vector length)."""
        return self.n1 * self.n2

    @property
    def n_beams(self) -> int:
        return self.n1 * self.o1 * self.n2 * self.o2


def dft_vector(n: int, o: int, theta: int) -> np.ndarray:
    """Length-n oversampled DFT vector: element k is exp(j*2*pi*theta*k/(n*o))."""
    if n < 1 or o < 1:
        raise ConfigError(f"n and o must be >= 1, got n={n}, o={o}")
    if not 0 <= theta <= n * o - 1:
        raise ContractError(f"theta must be in [0, {n * o - 1}], got {theta}")
    k = np.arange(n)
    return np.exp(2j * np.pi * theta * k / (n * o))


class BeamGrid:
    """All n1*o1*n2*o2 oversampled 2D DFT beams of a panel, precomputed.

    ``matrix`` has one beam per row (length n1*n2, unit-modulus entries).
    """

    def __init__(self, config: ArrayConfig):
        self.config = config
        n1, n2, o1, o2 = config.n1, config.n2, config.o1, config.o2
        h = np.stack([dft_vector(n1, o1, t) for t in range(n1 * o1)])
        v = np.stack([dft_vector(n2, o2, t) for t in range(n2 * o2)])
        # kron(h[t1], v[t2]) for every pair, theta2 fastest
        self.matrix = np.einsum("ai,bj->abij", h, v).reshape(
            n1 * o1 * n2 * o2, n1 * n2
        )

    def __len__(self) -> int:
        return self.matrix.shape[0]

    def flat_index(self, theta1: int, theta2: int) -> int:
        c = self.config
        if not (0 <= theta1 < c.n1 * c.o1 and 0 <= theta2 < c.n2 * c.o2):
            raise ContractError(f"beam index ({theta1}, {theta2}) out of range")
        return theta1 * (c.n2 * c.o2) + theta2

    def angles(self, flat: int) -> tuple[int, int]:
        c = self.config
        if not 0 <= flat < len(self):
            raise ContractError(f"flat beam index {flat} out of range")
        return divmod(flat, c.n2 * c.o2)

    def beam(self, theta1: int, theta2: int) -> np.ndarray:
        return self.matrix[self.flat_index(theta1, theta2)]


@lru_cache(maxsize=None)
def beam_grid(config: ArrayConfig) -> BeamGrid:
    """Cached beam grid for a panel; shared read-only by the codebooks."""
    return BeamGrid(config)


def steering_vector(
    config: ArrayConfig, azimuth: float, zenith: float, polarization: int = 0
) -> np.ndarray:
    """Single-polarization array response of the n1 x n2 panel.

    Half-wavelength uniform spacing, ideal elements: port (p1, p2) has
    phase pi*(p1*sin(zenith)*sin(azimuth) + p2*cos(zenith)), laid out with
    p2 fastest to match the beam-grid Kronecker order. The two slant
    polarizations carry opposite broadside gain signs (+1 for 0, -1 for 1);
    per-path polarization mixing is the channel model's job.
    """
    if polarization not in (0, 1):
        raise ContractError(f"polarization must be 0 or 1, got {polarization}")
    if not (np.isfinite(azimuth) and np.isfinite(zenith)):
        raise ContractError("angles must be finite")
    p1 = np.arange(config.n1)
    p2 = np.arange(config.n2)
    phase = np.pi * (
        p1[:, None] * (np.sin(zenith) * np.sin(azimuth)) + p2[None, :] * np.cos(zenith)
    )
    vec = np.exp(1j * phase).reshape(config.n1 * config.n2)
    return vec if polarization == 0 else -vec
