"""High-resolution rank-1 subband codebook: K-beam linear combination.

Encoding picks one oversampling rotation and K mutually orthogonal beams
shared by both polarizations, then per subband quantizes each of the 2K
combining coefficients: wideband amplitude (8 levels, strongest pinned to
1), optional subband amplitude ({sqrt(0.5), 1}), and QPSK/8PSK phase.
Overhead is variable: coefficients whose wideband amplitude quantizes to
zero carry no per-subband bits.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beams import ArrayConfig, beam_grid
from .errors import ConfigError, ContractError

WB_AMP_LEVELS = np.array(
    [0.0] + [math.sqrt(1.0 / (2 ** k)) for k in range(6, -1, -1)]
)  # 0, sqrt(1/64) ... sqrt(1/2), 1
SB_AMP_LEVELS = np.array([math.sqrt(0.5), 1.0])
WB_AMP_BITS = 3

PHASE_BITS = {"qpsk": 2, "8psk": 3}


@dataclass(frozen=True)
class Type2Config:
    k_beams: int = 4
    phase_mode: str = "qpsk"
    subband_amplitude: bool = False

    def __post_init__(self):
        if self.k_beams < 1:
            raise ConfigError(f"k_beams must be >= 1, got {self.k_beams}")
        if self.phase_mode not in PHASE_BITS:
            raise ConfigError(f"phase_mode must be one of {sorted(PHASE_BITS)}")

    @property
    def phase_bits(self) -> int:
        return PHASE_BITS[self.phase_mode]


@dataclass
class Type2Report:
    rotation: tuple[int, int]
    beam_set: tuple[int, ...]  # global grid indices, ascending
    strongest: int  # coefficient index r*K + i in [0, 2K)
    wb_amp_codes: np.ndarray  # (2, K) ints in [0, 8)
    phase_codes: np.ndarray  # (ns, 2, K) ints in [0, 2^phase_bits)
    sb_amp_codes: Optional[np.ndarray]  # (ns, 2, K) ints in {0, 1} or None
    bit_cost: int

    @property
    def n_subbands(self) -> int:
        return self.phase_codes.shape[0]


def rotation_beams(config: ArrayConfig, q1: int, q2: int) -> np.ndarray:
    """Global flat indices of the n1*n2 orthogonal beams of rotation (q1, q2)."""
    grid = beam_grid(config)
    idx = [
        grid.flat_index(q1 + config.o1 * a, q2 + config.o2 * b)
        for a in range(config.n1)
        for b in range(config.n2)
    ]
    return np.array(idx, dtype=np.int64)


def select_beams(
    v_stack: np.ndarray, config: ArrayConfig, t2: Type2Config
) -> tuple[tuple[int, int], np.ndarray]:
    """Best rotation and its K strongest orthogonal beams.

    Beams are scored by projected power summed over subbands and both
    polarization halves; rotations by the power their top K capture.
    Ties break to the lowest rotation / beam indices. Within a rotation the
    beams are orthogonal, so the greedy top-K equals the exhaustive best
    K-subset.
    """
    v_stack = np.asarray(v_stack, dtype=np.complex128)
    half = config.n_ports
    if v_stack.ndim != 2 or v_stack.shape[0] != 2 * half:
        raise ContractError(f"v_stack must be ({2 * half}, ns), got {v_stack.shape}")
    if t2.k_beams > half:
        raise ConfigError(f"k_beams={t2.k_beams} exceeds orthogonal basis size {half}")

    grid = beam_grid(config)
    # mathematically tied rotations (common for on-grid channels) must not be
    # reordered by rounding noise; scale the tolerance by the total projected
    # power G*ns of a complete rotation basis
    tie_tol = 1e-9 * half * v_stack.shape[1]
    best = None
    for q1 in range(config.o1):
        for q2 in range(config.o2):
            idx = rotation_beams(config, q1, q2)
            b = grid.matrix[idx]
            proj = np.abs(b.conj() @ v_stack[:half]) ** 2 + np.abs(b.conj() @ v_stack[half:]) ** 2
            scores = proj.sum(axis=1)
            order = np.argsort(-scores, kind="stable")[: t2.k_beams]
            captured = float(scores[order].sum())
            if best is None or captured > best[0] + tie_tol:
                best = (captured, (q1, q2), np.sort(idx[order]))
    return best[1], best[2]


def _nearest_level_codes(values: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Nearest entry of an ascending level table; exact midpoints go up."""
    mid = (levels[:-1] + levels[1:]) / 2.0
    return np.searchsorted(mid, values, side="right")


def _phase_codes(angles: np.ndarray, bits: int) -> np.ndarray:
    """Nearest constellation point exp(j*2*pi*c/2^bits); exact midpoints take the lower code."""
    q = 1 << bits
    t = angles * q / (2.0 * np.pi)
    lo = np.floor(t)
    frac = t - lo
    lower = np.mod(lo.astype(np.int64), q)
    upper = np.mod(lower + 1, q)
    out = np.where(frac > 0.5, upper, lower)
    return np.where(frac == 0.5, np.minimum(lower, upper), out)


def encode_type2(
    v_stack: np.ndarray, config: ArrayConfig, t2: Type2Config
) -> Type2Report:
    v_stack = np.asarray(v_stack, dtype=np.complex128)
    rotation, beam_idx = select_beams(v_stack, config, t2)
    half = config.n_ports
    k = t2.k_beams
    ns = v_stack.shape[1]
    b = beam_grid(config).matrix[beam_idx]

    # orthogonal beams with squared norm n1*n2: least-squares coefficients
    # are scaled inner products
    coeff = np.stack(
        [(b.conj() @ v_stack[:half]) / half, (b.conj() @ v_stack[half:]) / half]
    )  # (2, K, ns)
    coeff = np.transpose(coeff, (2, 0, 1))  # (ns, 2, K)

    mean_mag = np.abs(coeff).mean(axis=0)  # (2, K)
    strongest = int(np.argmax(mean_mag.reshape(-1)))
    ref = mean_mag.reshape(-1)[strongest]
    if not ref > 0:
        raise ContractError("v_stack has no energy on the selected beams")

    wb_codes = _nearest_level_codes(mean_mag / ref, WB_AMP_LEVELS)
    wb_levels = WB_AMP_LEVELS[wb_codes]  # (2, K)

    phase_codes = _phase_codes(np.angle(coeff), t2.phase_bits)

    sb_codes = None
    if t2.subband_amplitude:
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(coeff) / (ref * wb_levels[None, :, :])
        ratio = np.where(wb_levels[None, :, :] > 0, ratio, 1.0)
        sb_codes = _nearest_level_codes(ratio, SB_AMP_LEVELS)

    report = Type2Report(
        rotation=rotation,
        beam_set=tuple(int(i) for i in beam_idx),
        strongest=strongest,
        wb_amp_codes=wb_codes,
        phase_codes=phase_codes,
        sb_amp_codes=sb_codes,
        bit_cost=0,
    )
    report.bit_cost = overhead_type2(report, config, t2)
    return report


def decode_type2(
    report: Type2Report, config: ArrayConfig, t2: Type2Config
) -> np.ndarray:
    """Reconstruct the (2*n1*n2, ns) matrix; columns are unit norm."""
    k = len(report.beam_set)
    if k != t2.k_beams:
        raise ContractError("report beam count does not match configuration")
    if report.wb_amp_codes.shape != (2, k):
        raise ContractError("malformed wideband amplitude codes")
    if not 0 <= report.strongest < 2 * k:
        raise ContractError("strongest-coefficient index out of range")
    if report.wb_amp_codes.reshape(-1)[report.strongest] != len(WB_AMP_LEVELS) - 1:
        raise ContractError("strongest coefficient must carry the top amplitude code")
    ns = report.n_subbands
    b = beam_grid(config).matrix[list(report.beam_set)]  # (K, n_ports)

    amp = WB_AMP_LEVELS[report.wb_amp_codes][None, :, :] * np.ones((ns, 2, k))
    if t2.subband_amplitude:
        if report.sb_amp_codes is None:
            raise ContractError("report lacks subband amplitude codes")
        amp = amp * SB_AMP_LEVELS[report.sb_amp_codes]
    phase = np.exp(2j * np.pi * report.phase_codes / (1 << t2.phase_bits))
    weights = amp * phase  # (ns, 2, K)

    cols = np.einsum("srk,kp->srp", weights, b)  # (ns, 2, n_ports)
    out = cols.reshape(ns, -1).T  # stack polarizations: (2*n_ports, ns)
    norms = np.linalg.norm(out, axis=0)
    if not np.all(norms > 0):
        raise ContractError("decoded column collapsed to zero")
    return out / norms


def overhead_type2(report: Type2Report, config: ArrayConfig, t2: Type2Config) -> int:
    """Variable bit cost of one report.

    rotation + beam subset + strongest index + 3-bit wideband amplitudes
    for the 2K-1 non-strongest coefficients + per-subband (phase and
    optional subband-amplitude) bits for coefficients with nonzero
    wideband amplitude.
    """
    k = len(report.beam_set)
    n_ports = config.n_ports
    bits = (config.o1 * config.o2 - 1).bit_length()
    bits += (math.comb(n_ports, k) - 1).bit_length()
    bits += (2 * k - 1).bit_length()
    bits += WB_AMP_BITS * (2 * k - 1)
    n_nonzero = int(np.count_nonzero(report.wb_amp_codes))
    sb_bits = 1 if t2.subband_amplitude else 0
    bits += report.n_subbands * (t2.phase_bits + sb_bits) * n_nonzero
    return bits


def encode_dataset(stacks: np.ndarray, config: ArrayConfig, t2: Type2Config):
    """Encode/decode each (nt, ns) stack; returns (reports, per-sample rho)."""
    from .metrics import column_similarities

    reports = []
    sims = np.empty(len(stacks))
    for i, v_stack in enumerate(stacks):
        rep = encode_type2(v_stack, config, t2)
        recon = decode_type2(rep, config, t2)
        sims[i] = column_similarities(v_stack, recon).mean()
        reports.append(rep)
    return reports, sims
