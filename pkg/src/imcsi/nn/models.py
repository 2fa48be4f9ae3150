"""Model descriptions and the three feedback architectures.

Architectures (encoder widths follow the published layer tables at
hidden_scale=1; the scale knob shrinks hidden layers for quick desk runs
and never touches input, output, or code dimensions):

* imcsinet_s  - FC encoder/decoder for one eigenvector, binarized code
* imcsinet_m  - FC encoder/decoder for a stacked eigen matrix, uniform code
* bi_imcsinet - three bidirectional LSTM layers encode the subband
  sequence to M values per subband; decoder identical to imcsinet_m
"""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, ContractError
from ..quantizers import QuantizerSpec
from ..rng import RandomStream, derive_key
from .layers import BatchNorm, Dense, LeakyReLU, Quantize, Tanh
from .lstm import BiLstm

ARCHITECTURES = ("imcsinet_s", "imcsinet_m", "bi_imcsinet")


def _scaled(width: int, scale: float) -> int:
    return max(1, round(width * scale))


@dataclass(frozen=True)
class ModelSpec:
    architecture: str
    nt: int
    ns: int
    compressed_dim: int  # L
    quantizer: QuantizerSpec
    leaky_slope: float = 0.3
    hidden_scale: float = 1.0

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {self.architecture!r}")
        if self.nt < 1 or self.ns < 1:
            raise ConfigError("nt and ns must be >= 1")
        if self.architecture == "imcsinet_s" and self.ns != 1:
            raise ConfigError("imcsinet_s is a single-subband architecture (ns=1)")
        if self.compressed_dim < 1:
            raise ConfigError("compressed_dim must be >= 1")
        if self.architecture == "bi_imcsinet" and self.compressed_dim % self.ns != 0:
            raise ConfigError(
                f"bi_imcsinet needs ns | L, got L={self.compressed_dim}, ns={self.ns}"
            )
        if not 0 < self.hidden_scale <= 1:
            raise ConfigError("hidden_scale must be in (0, 1]")

    @classmethod
    def from_alpha(cls, architecture, nt, ns, alpha, quantizer, **kwargs):
        """Derive L from a compression ratio: L = round(alpha * input_dim).

        bi_imcsinet rounds the per-subband dim instead (M = round(alpha*2*nt),
        L = ns*M) so the subband split stays exact.
        """
        if not 0 < alpha < 1:
            raise ConfigError(f"alpha must be in (0, 1), got {alpha}")
        if architecture == "imcsinet_s":
            l = round(alpha * 2 * nt)
        elif architecture == "imcsinet_m":
            l = round(alpha * 2 * nt * ns)
        else:
            l = ns * round(alpha * 2 * nt)
        return cls(architecture, nt, ns, max(1, l), quantizer, **kwargs)

    @property
    def alpha(self) -> float:
        return self.compressed_dim / self.input_dim

    @property
    def input_dim(self) -> int:
        return 2 * self.nt * self.ns

    @property
    def per_subband_dim(self) -> int:
        """M: compressed values per subband (bi_imcsinet only)."""
        return self.compressed_dim // self.ns

    @property
    def n_bits(self) -> int:
        return self.compressed_dim * self.quantizer.bits

    def layer_dims(self) -> list:
        """Layer descriptors: ("fc_bn", I, O) and ("bilstm", I, O, T)."""
        nt, ns, l = self.nt, self.ns, self.compressed_dim
        s = self.hidden_scale
        if self.architecture == "imcsinet_s":
            w = _scaled(16 * nt, s)
            enc = [("fc_bn", 2 * nt, w), ("fc_bn", w, w), ("fc_bn", w, l)]
            dec = [("fc_bn", l, w), ("fc_bn", w, w), ("fc_bn", w, 2 * nt)]
            return enc + dec
        if self.architecture == "imcsinet_m":
            w = _scaled(8 * nt * ns, s)
            enc = [("fc_bn", 2 * nt * ns, w), ("fc_bn", w, w), ("fc_bn", w, l)]
            dec = [("fc_bn", l, w), ("fc_bn", w, w), ("fc_bn", w, 2 * nt * ns)]
            return enc + dec
        m = self.per_subband_dim
        h1 = _scaled(8 * nt, s)
        h2 = _scaled(nt, s)
        w = _scaled(8 * nt * ns, s)
        enc = [("bilstm", 2 * nt, h1, ns), ("bilstm", h1, h2, ns), ("bilstm", h2, m, ns)]
        dec = [("fc_bn", l, w), ("fc_bn", w, w), ("fc_bn", w, 2 * nt * ns)]
        return enc + dec


class FeedbackModel:
    """Encoder -> quantizer -> decoder with manual forward/backward passes."""

    def __init__(self, spec: ModelSpec, init_seed: int = 0, dtype=np.float32):
        self.spec = spec
        self.init_seed = init_seed
        self.dtype = dtype
        stream = RandomStream(derive_key(init_seed, 0))
        dims = spec.layer_dims()

        self.encoder = []
        for i, d in enumerate(dims[:3]):
            if d[0] == "bilstm":
                self.encoder.append((f"enc{i + 1}", BiLstm(d[1], d[2], stream, dtype=dtype)))
            else:
                act = Tanh() if i == 2 else LeakyReLU(spec.leaky_slope)
                self.encoder.append((f"enc{i + 1}.fc", Dense(d[1], d[2], stream, dtype=dtype)))
                self.encoder.append((f"enc{i + 1}.bn", BatchNorm(d[2], dtype=dtype, stream=stream)))
                self.encoder.append((f"enc{i + 1}.act", act))
        self.quant = Quantize(spec.quantizer)
        self.decoder = []
        for i, d in enumerate(dims[3:]):
            act = Tanh() if i == 2 else LeakyReLU(spec.leaky_slope)
            self.decoder.append((f"dec{i + 1}.fc", Dense(d[1], d[2], stream, dtype=dtype)))
            self.decoder.append((f"dec{i + 1}.bn", BatchNorm(d[2], dtype=dtype, stream=stream)))
            self.decoder.append((f"dec{i + 1}.act", act))

        self.codes = None
        self._bi = spec.architecture == "bi_imcsinet"

    def _named_layers(self):
        for name, layer in self.encoder:
            if isinstance(layer, BiLstm):
                for dname, direction in layer.directions.items():
                    yield f"{name}.{dname}", direction
            else:
                yield name, layer
        yield "quant", self.quant
        yield from self.decoder

    def named_params(self):
        for lname, layer in self._named_layers():
            for pname, arr in layer.params.items():
                yield f"{lname}.{pname}", layer, pname, arr

    def named_state(self):
        for lname, layer in self._named_layers():
            for sname, arr in layer.state.items():
                yield f"{lname}.{sname}", layer, sname, arr

    def param_count(self) -> int:
        """Stored elements: trainable parameters plus batch-norm running stats."""
        total = sum(arr.size for _, _, _, arr in self.named_params())
        return total + sum(arr.size for _, _, _, arr in self.named_state())

    def snapshot(self) -> dict:
        """Copy of all parameters and running statistics."""
        out = {name: arr.copy() for name, _, _, arr in self.named_params()}
        out.update({name: arr.copy() for name, _, _, arr in self.named_state()})
        return out

    def restore(self, snap: dict):
        for name, layer, pname, _ in self.named_params():
            layer.params[pname] = snap[name].copy()
        for name, layer, sname, _ in self.named_state():
            layer.state[sname] = snap[name].copy()

    def clone(self) -> "FeedbackModel":
        other = FeedbackModel(self.spec, self.init_seed, self.dtype)
        other.restore(self.snapshot())
        return other

    def _check_input(self, x):
        spec = self.spec
        if self._bi:
            want = (spec.ns, 2 * spec.nt)
            if x.ndim != 3 or x.shape[1:] != want:
                raise ContractError(f"expected input (batch, {want[0]}, {want[1]}), got {x.shape}")
        else:
            if x.ndim != 2 or x.shape[1] != spec.input_dim:
                raise ContractError(f"expected input (batch, {spec.input_dim}), got {x.shape}")

    def forward(self, x, train: bool, stream: RandomStream = None) -> np.ndarray:
        x = np.asarray(x, dtype=self.dtype)
        self._check_input(x)
        h = x
        for _, layer in self.encoder:
            h = layer.forward(h, train, stream)
        if self._bi:
            h = h.reshape(h.shape[0], -1)  # (batch, ns*M), subband-major
        self.codes = self.quant.forward(h, train, stream)
        h = self.codes
        for _, layer in self.decoder:
            h = layer.forward(h, train, stream)
        return h

    def backward(self, dy) -> np.ndarray:
        dy = np.asarray(dy, dtype=self.dtype)
        for _, layer in reversed(self.decoder):
            dy = layer.backward(dy)
        dy = self.quant.backward(dy)
        if self._bi:
            dy = dy.reshape(dy.shape[0], self.spec.ns, self.spec.per_subband_dim)
        for _, layer in reversed(self.encoder):
            dy = layer.backward(dy)
        return dy

    # dataset <-> network representation -------------------------------------

    def inputs_from_targets(self, stacks: np.ndarray) -> np.ndarray:
        """Real-valued network inputs from complex (count, nt, ns) targets."""
        stacks = np.asarray(stacks, dtype=np.complex128)
        if stacks.ndim != 3 or stacks.shape[1] != self.spec.nt or stacks.shape[2] != self.spec.ns:
            raise ContractError(
                f"expected targets (count, {self.spec.nt}, {self.spec.ns}), got {stacks.shape}"
            )
        if self._bi:
            seq = stacks.transpose(0, 2, 1)  # (count, ns, nt)
            x = np.concatenate([seq.real, seq.imag], axis=2)
        else:
            vec = stacks.transpose(0, 2, 1).reshape(stacks.shape[0], -1)  # column-major
            x = np.concatenate([vec.real, vec.imag], axis=1)
        return x.astype(self.dtype)

    def outputs_to_stacks(self, y: np.ndarray) -> np.ndarray:
        """Complex (count, nt, ns) reconstructions from network outputs."""
        nt, ns = self.spec.nt, self.spec.ns
        half = nt * ns
        vec = y[:, :half].astype(np.float64) + 1j * y[:, half:].astype(np.float64)
        return vec.reshape(-1, ns, nt).transpose(0, 2, 1)

    def stack_grad_to_output_grad(self, g: np.ndarray) -> np.ndarray:
        """Map complex (count, nt, ns) gradients back to the output layout."""
        flat = g.transpose(0, 2, 1).reshape(g.shape[0], -1)
        return np.concatenate([flat.real, flat.imag], axis=1)


def build_model(spec: ModelSpec, init_seed: int = 0, dtype=np.float32) -> FeedbackModel:
    return FeedbackModel(spec, init_seed=init_seed, dtype=dtype)
