"""Training loop: negated-cosine loss, plateau LR halving, best-val snapshot.

Everything random (shuffling, stochastic binarization) flows from
TrainConfig.seed through dedicated sub-streams, so a fixed seed reproduces
the history bit-for-bit on one machine configuration.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ContractError
from ..metrics import SimilarityReport
from ..rng import RandomStream, derive_key
from .adam import Adam
from .models import FeedbackModel

_TINY = 1e-30


@dataclass
class TrainConfig:
    batch_size: int = 256
    epochs: int = 200
    initial_lr: float = 1e-3
    plateau_patience: int = 50
    lr_factor: float = 0.5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.initial_lr <= 0:
            raise ConfigError("initial_lr must be > 0")
        if self.plateau_patience < 1:
            raise ConfigError("plateau_patience must be >= 1")
        if self.batch_size < 1 or self.epochs < 0:
            raise ConfigError("batch_size must be >= 1 and epochs >= 0")


def loss_and_grad(targets: np.ndarray, recon: np.ndarray):
    """Negated mean per-column cosine similarity and its gradient w.r.t. recon.

    targets/recon: complex (batch, nt, ns). The gradient at a zero inner
    product or zero reconstruction column is the zero subgradient.
    """
    n, _, ns = targets.shape
    z = np.sum(np.conj(recon) * targets, axis=1)  # (n, ns)
    nh = np.linalg.norm(recon, axis=1)
    nv = np.linalg.norm(targets, axis=1)
    if not np.all(nv > 0):
        raise ContractError("targets contain zero columns")
    absz = np.abs(z)
    ok = (absz > _TINY) & (nh > _TINY)
    rho = np.where(ok, absz / np.maximum(nh * nv, _TINY), 0.0)
    loss = -float(rho.mean())

    # d rho / d conj(recon) column-wise: u*target - rho*recon/nh^2
    u = np.where(ok, np.conj(z) / np.maximum(absz * nh * nv, _TINY), 0.0)
    g_rho = u[:, None, :] * targets - np.where(ok, rho / np.maximum(nh * nh, _TINY), 0.0)[
        :, None, :
    ] * recon
    grad = -g_rho / (n * ns)
    return loss, grad, float(rho.mean())


def batch_loss(model: FeedbackModel, targets, train: bool, stream=None):
    """Forward pass plus loss; returns (loss, output-layout gradient)."""
    x = model.inputs_from_targets(targets)
    y = model.forward(x, train=train, stream=stream)
    recon = model.outputs_to_stacks(y)
    loss, grad, _ = loss_and_grad(np.asarray(targets, dtype=np.complex128), recon)
    return loss, model.stack_grad_to_output_grad(grad)


def dataset_loss(model: FeedbackModel, targets, batch_size: int) -> float:
    """Eval-mode loss over a whole set, batched."""
    total = 0.0
    count = len(targets)
    if count == 0:
        raise ContractError("empty evaluation split")
    for start in range(0, count, batch_size):
        chunk = targets[start : start + batch_size]
        loss, _ = batch_loss(model, chunk, train=False)
        total += loss * len(chunk)
    return total / count


def train(model: FeedbackModel, train_targets, val_targets, config: TrainConfig):
    """Optimize in place; returns (best snapshot restored into model, history).

    History rows are dicts: epoch, train_loss, val_loss, lr.
    """
    if len(train_targets) == 0 or len(val_targets) == 0:
        raise ContractError("train and val splits must be non-empty")
    shuffle_stream = RandomStream(derive_key(config.seed, 1))
    quant_stream = RandomStream(derive_key(config.seed, 2))
    opt = Adam(model, lr=config.initial_lr, beta1=config.beta1, beta2=config.beta2, eps=config.eps)

    history = []
    best_val = np.inf
    best_snap = None
    since_improve = 0
    lr = config.initial_lr

    for epoch in range(config.epochs):
        order = shuffle_stream.permutation(len(train_targets))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            idx = order[start : start + config.batch_size]
            batch = train_targets[idx]
            loss, dy = batch_loss(model, batch, train=True, stream=quant_stream)
            model.backward(dy)
            opt.lr = lr
            opt.step()
            epoch_loss += loss * len(idx)
        epoch_loss /= len(order)

        val_loss = dataset_loss(model, val_targets, config.batch_size)
        history.append(
            {"epoch": epoch, "train_loss": epoch_loss, "val_loss": val_loss, "lr": lr}
        )
        if val_loss < best_val:
            best_val = val_loss
            best_snap = model.snapshot()
            since_improve = 0
        else:
            since_improve += 1
            if since_improve >= config.plateau_patience:
                lr *= config.lr_factor
                since_improve = 0

    if best_snap is not None:
        model.restore(best_snap)
    return model, history


def evaluate(model: FeedbackModel, targets, batch_size: int = 1024) -> SimilarityReport:
    """Eval-mode reconstruction similarity over a test set."""
    count = len(targets)
    if count == 0:
        raise ContractError("empty evaluation split")
    per_subband = np.zeros(model.spec.ns)
    total = 0.0
    for start in range(0, count, batch_size):
        chunk = np.asarray(targets[start : start + batch_size], dtype=np.complex128)
        x = model.inputs_from_targets(chunk)
        recon = model.outputs_to_stacks(model.forward(x, train=False))
        z = np.abs(np.sum(np.conj(recon) * chunk, axis=1))
        nh = np.linalg.norm(recon, axis=1)
        nv = np.linalg.norm(chunk, axis=1)
        rho = np.where(nh > _TINY, z / np.maximum(nh * nv, _TINY), 0.0)  # (batch, ns)
        per_subband += rho.sum(axis=0)
        total += float(rho.mean(axis=1).sum())
    return SimilarityReport(
        rho=total / count,
        n_samples=count,
        per_subband=(per_subband / count).tolist(),
    )
