"""Low-resolution rank-1 codebook: one DFT beam plus a co-phasing factor.

A codeword is (1/sqrt(2*n1*n2)) * [b; phi*b] for a grid beam b and
phi in {1, j, -1, -j}. Codewords are ordered by
flat = (beam_flat*4 + phi_index), which makes the exhaustive search and
its brute-force test oracle share one deterministic tie rule (lowest
index wins).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .beams import ArrayConfig, beam_grid
from .errors import ContractError

PHASES = np.array([1.0, 1.0j, -1.0, -1.0j])


@dataclass(frozen=True)
class Type1Pmi:
    theta1: int
    theta2: int
    phi_index: int
    flat_index: int


def codebook_size(config: ArrayConfig) -> int:
    return 4 * config.n_beams


@lru_cache(maxsize=None)
def enumerate_type1(config: ArrayConfig) -> np.ndarray:
    """All codewords as rows of a (4*n_beams, 2*n1*n2) complex matrix."""
    beams = beam_grid(config).matrix
    scale = 1.0 / np.sqrt(config.nt)
    n_beams, n_ports = beams.shape
    out = np.empty((4 * n_beams, 2 * n_ports), dtype=np.complex128)
    for b in range(n_beams):
        for p, phi in enumerate(PHASES):
            out[b * 4 + p, :n_ports] = beams[b]
            out[b * 4 + p, n_ports:] = phi * beams[b]
    out *= scale
    return out


def pmi_from_flat(config: ArrayConfig, flat_index: int) -> Type1Pmi:
    if not 0 <= flat_index < codebook_size(config):
        raise ContractError(
            f"flat_index {flat_index} out of range [0, {codebook_size(config)})"
        )
    beam_flat, phi_index = divmod(flat_index, 4)
    theta1, theta2 = beam_grid(config).angles(beam_flat)
    return Type1Pmi(theta1=theta1, theta2=theta2, phi_index=phi_index, flat_index=flat_index)


def encode_type1(v: np.ndarray, config: ArrayConfig) -> Type1Pmi:
    """Codeword index maximizing |w^H v|; ties break to the lowest index.

    Inner products with the beam grid are computed once per polarization
    half and reused across the four co-phasing values.
    """
    v = np.asarray(v, dtype=np.complex128).reshape(-1)
    if v.shape[0] != config.nt:
        raise ContractError(f"expected vector of length {config.nt}, got {v.shape[0]}")
    half = config.n_ports
    beams = beam_grid(config).matrix
    top = beams.conj() @ v[:half]
    bot = beams.conj() @ v[half:]
    # |w^H v| = scale*|b^H v_top + conj(phi) * b^H v_bot|
    scores = np.abs(top[:, None] + PHASES.conj()[None, :] * bot[:, None])
    flat = int(np.argmax(scores.reshape(-1)))
    return pmi_from_flat(config, flat)


def decode_type1(pmi: Type1Pmi, config: ArrayConfig) -> np.ndarray:
    return enumerate_type1(config)[pmi.flat_index].copy()


def overhead_type1(config: ArrayConfig) -> int:
    """PMI bit width: ceil(log2(4 * n1*o1 * n2*o2))."""
    return (codebook_size(config) - 1).bit_length()


def encode_dataset(vectors: np.ndarray, config: ArrayConfig):
    """Encode each row vector; returns (pmis, similarities)."""
    pmis = []
    sims = np.empty(len(vectors))
    codebook = enumerate_type1(config)
    for i, v in enumerate(vectors):
        pmi = encode_type1(v, config)
        pmis.append(pmi)
        w = codebook[pmi.flat_index]
        sims[i] = np.abs(np.vdot(w, v)) / np.linalg.norm(v)
    return pmis, sims
