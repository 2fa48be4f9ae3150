"""Dense / batch-norm / activation / quantization layers with manual gradients.

Layers follow one protocol: ``forward(x, train, stream=None)`` caches what
the matching ``backward(dy)`` needs and ``backward`` returns the input
gradient while filling ``grads``. Parameters live in per-layer dicts so the
model can expose one flat ordered store.
"""

import numpy as np

from ..errors import ContractError
from ..quantizers import (
    QuantizerSpec,
    binarize,
    binarize_deterministic,
    straight_through_backward,
    uniform_quantize,
)


class Layer:
    """Stateless base: parameter-free layers only override forward/backward."""

    def __init__(self):
        self.params = {}
        self.grads = {}
        self.state = {}

    def forward(self, x, train, stream=None):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError


class Dense(Layer):
    def __init__(self, in_dim, out_dim, stream, dtype=np.float32):
        super().__init__()
        bound = np.sqrt(6.0 / (in_dim + out_dim))
        w = (2.0 * stream.uniform(in_dim * out_dim) - 1.0) * bound
        self.params = {
            "w": w.reshape(in_dim, out_dim).astype(dtype),
            "b": np.zeros(out_dim, dtype=dtype),
        }
        self._x = None

    def forward(self, x, train, stream=None):
        self._x = x
        return x @ self.params["w"] + self.params["b"]

    def backward(self, dy):
        self.grads = {"w": self._x.T @ dy, "b": dy.sum(axis=0)}
        return dy @ self.params["w"].T


class BatchNorm(Layer):
    """Per-feature normalization; batch statistics in train mode, running in eval.

    beta starts at small symmetric noise rather than exactly zero: an
    all-zero code vector (quantizer deadzone) otherwise pins every
    downstream activation at 0, where the cosine loss has a zero
    subgradient and training cannot start.
    """

    def __init__(self, dim, dtype=np.float32, eps=1e-5, momentum=0.99, stream=None):
        super().__init__()
        self.eps = eps
        self.momentum = momentum
        beta = (
            ((2.0 * stream.uniform(dim) - 1.0) * 0.05).astype(dtype)
            if stream is not None
            else np.zeros(dim, dtype=dtype)
        )
        self.params = {
            "gamma": np.ones(dim, dtype=dtype),
            "beta": beta,
        }
        self.state = {
            "running_mean": np.zeros(dim, dtype=dtype),
            "running_var": np.ones(dim, dtype=dtype),
        }
        self._cache = None

    def forward(self, x, train, stream=None):
        if train:
            mean = x.mean(axis=0)
            var = x.var(axis=0)
            ivar = 1.0 / np.sqrt(var + self.eps)
            xhat = (x - mean) * ivar
            m = self.momentum
            self.state["running_mean"] = (
                m * self.state["running_mean"] + (1.0 - m) * mean
            ).astype(x.dtype)
            self.state["running_var"] = (
                m * self.state["running_var"] + (1.0 - m) * var
            ).astype(x.dtype)
        else:
            ivar = 1.0 / np.sqrt(self.state["running_var"] + self.eps)
            xhat = (x - self.state["running_mean"]) * ivar
        self._cache = (xhat, ivar, train)
        return self.params["gamma"] * xhat + self.params["beta"]

    def backward(self, dy):
        xhat, ivar, train = self._cache
        self.grads = {"gamma": (dy * xhat).sum(axis=0), "beta": dy.sum(axis=0)}
        dxhat = dy * self.params["gamma"]
        if not train:
            return dxhat * ivar
        return ivar * (
            dxhat - dxhat.mean(axis=0) - xhat * (dxhat * xhat).mean(axis=0)
        )


class LeakyReLU(Layer):
    def __init__(self, slope=0.3):
        super().__init__()
        self.slope = slope
        self._mask = None

    def forward(self, x, train, stream=None):
        self._mask = x >= 0
        return np.where(self._mask, x, self.slope * x)

    def backward(self, dy):
        return np.where(self._mask, dy, self.slope * dy)


class Tanh(Layer):
    def __init__(self):
        super().__init__()
        self._y = None

    def forward(self, x, train, stream=None):
        self._y = np.tanh(x)
        return self._y

    def backward(self, dy):
        return dy * (1.0 - self._y * self._y)


class Quantize(Layer):
    """Feedback quantizer with a straight-through backward pass."""

    def __init__(self, spec: QuantizerSpec):
        super().__init__()
        self.spec = spec

    def forward(self, x, train, stream=None):
        x64 = np.asarray(x, dtype=np.float64)
        if self.spec.kind == "binarize":
            if train:
                if stream is None:
                    raise ContractError("stochastic binarization needs an rng stream")
                q = binarize(x64, stream)
            else:
                q = binarize_deterministic(x64)
        else:
            q = uniform_quantize(x64, self.spec.bits)
        return q.astype(x.dtype)

    def backward(self, dy):
        return straight_through_backward(dy)
