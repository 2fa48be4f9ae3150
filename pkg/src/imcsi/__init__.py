"""Desk-scale laboratory for implicit CSI feedback in massive MIMO.

Channel synthesis, eigenvector feedback targets, the low/high-resolution
DFT codebook baselines, feedback quantizers, and three learned feedback
architectures with a from-scratch training engine.
"""

from .beams import ArrayConfig
from .channel import ChannelSample, SceneConfig, synth_channel, synth_dataset
from .eigen import (
    EigenTarget,
    canonical_phase,
    dominant_right_singular_vector,
    pse,
    subband_eigenvectors,
)
from .metrics import SimilarityReport, cosine_similarity, stacked_cosine_similarity
from .quantizers import QuantizerSpec, binarize, feedback_bits, uniform_quantize

__all__ = [
    "ArrayConfig",
    "ChannelSample",
    "EigenTarget",
    "QuantizerSpec",
    "SceneConfig",
    "SimilarityReport",
    "binarize",
    "canonical_phase",
    "cosine_similarity",
    "dominant_right_singular_vector",
    "feedback_bits",
    "pse",
    "stacked_cosine_similarity",
    "subband_eigenvectors",
    "synth_channel",
    "synth_dataset",
    "uniform_quantize",
]

__version__ = "0.1.0"
