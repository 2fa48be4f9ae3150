"""Adaptive moment estimation over a model's flat parameter store."""

import numpy as np


class Adam:
    def __init__(self, model, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.model = model
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = {name: np.zeros_like(arr) for name, _, _, arr in model.named_params()}
        self.v = {name: np.zeros_like(arr) for name, _, _, arr in model.named_params()}

    def step(self):
        """One bias-corrected update from the gradients stored on the layers."""
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        c1 = 1.0 - b1 ** self.t
        c2 = 1.0 - b2 ** self.t
        for name, layer, pname, arr in self.model.named_params():
            g = layer.grads.get(pname)
            if g is None:
                continue
            m = self.m[name] = b1 * self.m[name] + (1.0 - b1) * g
            v = self.v[name] = b2 * self.v[name] + (1.0 - b2) * (g * g)
            arr -= (self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)).astype(arr.dtype)
