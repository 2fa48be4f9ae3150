"""Feedback ground truth: dominant eigenvectors, stacking, and compressibility.

The per-subband target is the eigenvector of the largest eigenvalue of the
RB-averaged Gram matrix H^H H, phase-canonicalized so targets are unique.
Spectral flatness of a vector's DFT power profile ("pse") measures how
compressible a target is; 0 means single-bin energy, 1 means flat.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ContractError, DegenerateInputError

_ZERO_TOL = 1e-12


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rotate by a unit phasor so the first non-negligible entry is real >= 0."""
    v = np.asarray(v)
    mags = np.abs(v)
    if not mags.max() > _ZERO_TOL:
        raise DegenerateInputError("cannot canonicalize a (near-)zero vector")
    k = int(np.argmax(mags > _ZERO_TOL))
    return v * (np.conj(v[k]) / mags[k])


def dominant_right_singular_vector(h: np.ndarray) -> tuple[np.ndarray, float]:
    """Top right singular vector and singular value of h, via EVD of h^H h."""
    h = np.asarray(h, dtype=np.complex128)
    if h.ndim != 2:
        raise ContractError(f"expected a matrix, got ndim={h.ndim}")
    if not np.all(np.isfinite(h)):
        raise ContractError("matrix contains non-finite entries")
    if not np.abs(h).max() > 0:
        raise DegenerateInputError("zero matrix has no dominant direction")
    gram = h.conj().T @ h
    eigvals, eigvecs = np.linalg.eigh(gram)
    v = canonical_phase(eigvecs[:, -1])
    sigma = float(np.sqrt(max(eigvals[-1], 0.0)))
    return v, sigma


def dominant_gram_eigenvector(gram: np.ndarray) -> tuple[np.ndarray, float]:
    """Top eigenvector/eigenvalue of a Hermitian Gram matrix, canonical phase."""
    eigvals, eigvecs = np.linalg.eigh(gram)
    return canonical_phase(eigvecs[:, -1]), float(eigvals[-1])


@dataclass
class EigenTarget:
    """Ground-truth feedback target for one channel drop.

    mode "single_rb": ``matrix`` is (nt, 1); mode "multi_rb": (nt, n_subbands).
    Columns are unit-norm with canonical phase.
    """

    mode: str
    matrix: np.ndarray
    sample_id: str = ""

    def __post_init__(self):
        if self.mode not in ("single_rb", "multi_rb"):
            raise ContractError(f"unknown eigen mode {self.mode!r}")
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        if self.matrix.ndim == 1:
            self.matrix = self.matrix[:, None]

    @property
    def v(self) -> np.ndarray:
        """Single eigenvector (first column)."""
        return self.matrix[:, 0]


def subband_gram(h: np.ndarray, n_subbands: int) -> np.ndarray:
    """Per-subband mean of H^H H over the RBs of each subband: (ns, nt, nt)."""
    h = np.asarray(h, dtype=np.complex128)
    n_rb = h.shape[0]
    if n_subbands < 1 or n_rb % n_subbands != 0:
        raise ConfigError(
            f"n_rb={n_rb} must be divisible by n_subbands={n_subbands}"
        )
    per_rb = np.einsum("rai,raj->rij", h.conj(), h)
    return per_rb.reshape(n_subbands, n_rb // n_subbands, *per_rb.shape[1:]).mean(axis=1)


def subband_eigenvectors(h: np.ndarray, n_subbands: int, sample_id: str = "") -> EigenTarget:
    """Stacked per-subband dominant eigenvectors of a (n_rb, nr, nt) channel."""
    grams = subband_gram(h, n_subbands)
    cols = [dominant_gram_eigenvector(g)[0] for g in grams]
    return EigenTarget(mode="multi_rb", matrix=np.stack(cols, axis=1), sample_id=sample_id)


def pse(v: np.ndarray) -> float:
    """Normalized spectral entropy of the DFT power profile, in [0, 1]."""
    v = np.asarray(v).reshape(-1)
    n = v.shape[0]
    if n < 2:
        raise ContractError("spectral entropy needs a vector of length >= 2")
    power = np.abs(np.fft.fft(v)) ** 2
    total = power.sum()
    if not total > 0:
        raise DegenerateInputError("zero vector has no spectral distribution")
    p = power / total
    nonzero = p[p > 0]
    return float(-(nonzero * np.log2(nonzero)).sum() / np.log2(n))


def pse_batch(vectors: np.ndarray) -> np.ndarray:
    """Row-wise :func:`pse` of a (count, n) complex array."""
    vectors = np.asarray(vectors)
    n = vectors.shape[1]
    if n < 2:
        raise ContractError("spectral entropy needs vectors of length >= 2")
    power = np.abs(np.fft.fft(vectors, axis=1)) ** 2
    total = power.sum(axis=1, keepdims=True)
    if not np.all(total > 0):
        raise DegenerateInputError("zero vector has no spectral distribution")
    p = power / total
    ent = -np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0).sum(axis=1)
    return ent / np.log2(n)
