"""LSTM direction and bidirectional layer with full BPTT gradients.

Standard four-gate cell, gate order (i, f, g, o), sigmoid gates, tanh
candidate and output nonlinearity, forget-gate bias initialized to 1.
A "backward" direction runs over the reversed sequence but stores every
output at its original time index, so bidirectional averaging needs no
extra realignment step.
"""

import numpy as np

from .layers import Layer


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


class LstmDirection(Layer):
    """One direction over a (batch, time, in_dim) sequence; shares weights across steps."""

    def __init__(self, in_dim, out_dim, stream, reverse=False, dtype=np.float32):
        super().__init__()
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.reverse = reverse
        bound = np.sqrt(6.0 / (in_dim + out_dim))
        wx = (2.0 * stream.uniform(in_dim * 4 * out_dim) - 1.0) * bound
        wh = (2.0 * stream.uniform(out_dim * 4 * out_dim) - 1.0) * bound
        b = np.zeros(4 * out_dim)
        b[out_dim : 2 * out_dim] = 1.0  # forget gate open at init
        self.params = {
            "wx": wx.reshape(in_dim, 4 * out_dim).astype(dtype),
            "wh": wh.reshape(out_dim, 4 * out_dim).astype(dtype),
            "b": b.astype(dtype),
        }
        self._cache = None

    def _order(self, t_len):
        rng = range(t_len)
        return list(reversed(rng)) if self.reverse else list(rng)

    def forward(self, x, train, stream=None):
        n, t_len, _ = x.shape
        o_dim = self.out_dim
        wx, wh, b = self.params["wx"], self.params["wh"], self.params["b"]
        h = np.zeros((n, o_dim), dtype=x.dtype)
        c = np.zeros((n, o_dim), dtype=x.dtype)
        hs = np.zeros((n, t_len, o_dim), dtype=x.dtype)
        cache = {}
        for t in self._order(t_len):
            z = x[:, t] @ wx + h @ wh + b
            i = _sigmoid(z[:, :o_dim])
            f = _sigmoid(z[:, o_dim : 2 * o_dim])
            g = np.tanh(z[:, 2 * o_dim : 3 * o_dim])
            o = _sigmoid(z[:, 3 * o_dim :])
            c_new = f * c + i * g
            tanh_c = np.tanh(c_new)
            cache[t] = (x[:, t], h, c, i, f, g, o, tanh_c)
            h = o * tanh_c
            c = c_new
            hs[:, t] = h
        self._cache = (cache, x.shape)
        return hs

    def backward(self, dhs):
        cache, (n, t_len, in_dim) = self._cache
        o_dim = self.out_dim
        wx, wh = self.params["wx"], self.params["wh"]
        dwx = np.zeros_like(wx)
        dwh = np.zeros_like(wh)
        db = np.zeros_like(self.params["b"])
        dx = np.zeros((n, t_len, in_dim), dtype=dhs.dtype)
        dh_carry = np.zeros((n, o_dim), dtype=dhs.dtype)
        dc_carry = np.zeros((n, o_dim), dtype=dhs.dtype)
        for t in reversed(self._order(t_len)):
            x_t, h_prev, c_prev, i, f, g, o, tanh_c = cache[t]
            dh = dhs[:, t] + dh_carry
            do = dh * tanh_c
            dc = dc_carry + dh * o * (1.0 - tanh_c * tanh_c)
            di = dc * g
            dg = dc * i
            df = dc * c_prev
            dz = np.concatenate(
                [
                    di * i * (1.0 - i),
                    df * f * (1.0 - f),
                    dg * (1.0 - g * g),
                    do * o * (1.0 - o),
                ],
                axis=1,
            )
            dwx += x_t.T @ dz
            dwh += h_prev.T @ dz
            db += dz.sum(axis=0)
            dx[:, t] = dz @ wx.T
            dh_carry = dz @ wh.T
            dc_carry = dc * f
        self.grads = {"wx": dwx, "wh": dwh, "b": db}
        return dx


class BiLstm(Layer):
    """Average of a forward and a reversed LSTM pass, both in original time order."""

    def __init__(self, in_dim, out_dim, stream, dtype=np.float32):
        super().__init__()
        self.fwd = LstmDirection(in_dim, out_dim, stream, reverse=False, dtype=dtype)
        self.bwd = LstmDirection(in_dim, out_dim, stream, reverse=True, dtype=dtype)

    @property
    def directions(self):
        return {"fwd": self.fwd, "bwd": self.bwd}

    def forward(self, x, train, stream=None):
        return 0.5 * (self.fwd.forward(x, train) + self.bwd.forward(x, train))

    def backward(self, dy):
        half = 0.5 * dy
        return self.fwd.backward(half) + self.bwd.backward(half)
