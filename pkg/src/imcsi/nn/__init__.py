"""From-scratch differentiable engine for the learned feedback encoders/decoders."""

from .models import FeedbackModel, ModelSpec
from .training import TrainConfig, evaluate, train

__all__ = ["FeedbackModel", "ModelSpec", "TrainConfig", "train", "evaluate"]
