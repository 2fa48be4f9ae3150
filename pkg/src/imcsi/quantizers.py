"""Feedback-bit quantizers and the straight-through gradient convention.

Two quantizers cover the feedback stack: stochastic binarization (an
optimized 1-bit quantizer, unbiased in expectation) and B-bit uniform
quantization on [-1, 1]. Both are treated as identity in backpropagation.
At inference, binarization degrades to the deterministic sign function so
evaluations are repeatable; the stochastic behavior stays available for
training-mode studies.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .rng import RandomStream

_INPUT_TOL = 1e-9


@dataclass(frozen=True)
class QuantizerSpec:
    kind: str  # "binarize" or "uniform"
    bits_per_element: int = 1

    def __post_init__(self):
        if self.kind not in ("binarize", "uniform"):
            raise ContractError(f"unknown quantizer kind {self.kind!r}")
        if self.bits_per_element < 1:
            raise ContractError("bits_per_element must be >= 1")
        if self.kind == "binarize" and self.bits_per_element != 1:
            raise ContractError("binarize implies 1 bit per element")

    @property
    def bits(self) -> int:
        return 1 if self.kind == "binarize" else self.bits_per_element


def _check_range(x: np.ndarray) -> np.ndarray:
    if np.any(np.abs(x) > 1.0 + _INPUT_TOL):
        raise ContractError("quantizer input must lie in [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def binarize(x, stream: RandomStream) -> np.ndarray:
    """Stochastic {-1, +1} quantization: +1 with probability (1+x)/2.

    Consumes exactly one uniform draw per element, in element order.
    """
    x = _check_range(np.asarray(x, dtype=np.float64))
    u = stream.uniform(x.size).reshape(x.shape)
    return np.where(u <= (1.0 + x) / 2.0, 1.0, -1.0)


def binarize_deterministic(x) -> np.ndarray:
    """Inference-time binarization: sign with ties to +1."""
    x = _check_range(np.asarray(x, dtype=np.float64))
    return np.where(x >= 0.0, 1.0, -1.0)


def uniform_quantize(x, bits: int) -> np.ndarray:
    """B-bit uniform quantization: round(x * 2^(B-1)) / 2^(B-1), half away from zero."""
    if bits < 1:
        raise ContractError(f"bits must be >= 1, got {bits}")
    x = _check_range(np.asarray(x, dtype=np.float64))
    scale = float(2 ** (bits - 1))
    y = x * scale
    return np.sign(y) * np.floor(np.abs(y) + 0.5) / scale


def feedback_bits(l: int, spec: QuantizerSpec) -> int:
    """Total feedback bits for an l-dimensional codeword: l * B."""
    if l < 1:
        raise ContractError(f"codeword dimension must be >= 1, got {l}")
    return l * spec.bits


def straight_through_backward(upstream_gradient: np.ndarray) -> np.ndarray:
    """Quantizer backward pass: gradient 1, i.e. pass-through."""
    return upstream_gradient
