"""Cosine-similarity figures of merit and the matching training losses.

All quantities are phase-invariant: rho = |v_hat^H v| / (||v_hat|| ||v||),
so a global phase on either argument changes nothing. The training losses
are exactly the negated similarities, which keeps the optimized objective
and the reported metric identical.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DegenerateInputError


@dataclass
class SimilarityReport:
    rho: float
    n_samples: int
    per_subband: list[float] = field(default_factory=list)


def cosine_similarity(v: np.ndarray, v_hat: np.ndarray) -> float:
    v = np.asarray(v).reshape(-1)
    v_hat = np.asarray(v_hat).reshape(-1)
    if v.shape != v_hat.shape:
        raise ContractError(f"length mismatch: {v.shape} vs {v_hat.shape}")
    nv = np.linalg.norm(v)
    nh = np.linalg.norm(v_hat)
    if not (nv > 0 and nh > 0):
        raise DegenerateInputError("cosine similarity undefined for zero vectors")
    return float(np.abs(np.vdot(v_hat, v)) / (nv * nh))


def column_similarities(v_stack: np.ndarray, v_stack_hat: np.ndarray) -> np.ndarray:
    """Per-column |v_hat^H v| / (||v_hat|| ||v||) for two (nt, ns) matrices."""
    v_stack = np.asarray(v_stack)
    v_stack_hat = np.asarray(v_stack_hat)
    if v_stack.shape != v_stack_hat.shape:
        raise ContractError(f"shape mismatch: {v_stack.shape} vs {v_stack_hat.shape}")
    nv = np.linalg.norm(v_stack, axis=0)
    nh = np.linalg.norm(v_stack_hat, axis=0)
    if not (np.all(nv > 0) and np.all(nh > 0)):
        raise DegenerateInputError("cosine similarity undefined for zero columns")
    inner = np.abs(np.sum(np.conj(v_stack_hat) * v_stack, axis=0))
    return inner / (nv * nh)


def stacked_cosine_similarity(v_stack: np.ndarray, v_stack_hat: np.ndarray) -> SimilarityReport:
    """Mean per-subband similarity between two stacked eigen matrices."""
    per = column_similarities(v_stack, v_stack_hat)
    return SimilarityReport(rho=float(per.mean()), n_samples=1, per_subband=per.tolist())


def loss_single(pairs) -> float:
    """Negated mean similarity over a batch of (v, v_hat) vector pairs."""
    sims = [cosine_similarity(v, v_hat) for v, v_hat in pairs]
    if not sims:
        raise ContractError("empty batch")
    return -float(np.mean(sims))


def loss_multi(pairs) -> float:
    """Negated mean per-subband similarity over a batch of (V, V_hat) pairs."""
    sims = [column_similarities(v, v_hat).mean() for v, v_hat in pairs]
    if not sims:
        raise ContractError("empty batch")
    return -float(np.mean(sims))
