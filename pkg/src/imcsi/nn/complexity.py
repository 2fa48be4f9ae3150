"""Parameter and FLOP accounting, per layer and in closed form.

Conventions (all exact integers): an FC layer with fan (I, O) carries
O*(I+1) parameters and O*(2I-1) FLOPs; batch norm carries 4O parameters
and no FLOPs (foldable into the preceding FC); activations are free; an
LSTM direction carries 4*(O*I + O^2 + O) parameters and, per time step,
the two gate matmuls 4O*(2I-1) + 4O*(2O-1) FLOPs.

The closed forms below are written in terms of (nt, ns, L, M) so they stay
integer-exact even when L was rounded from a compression ratio; they only
apply at hidden_scale = 1.
"""

from ..errors import ConfigError
from .models import ModelSpec


def fc_params(i: int, o: int) -> int:
    return o * (i + 1)


def fc_flops(i: int, o: int) -> int:
    return o * (2 * i - 1)


def bn_params(o: int) -> int:
    return 4 * o


def fc_bn_params(i: int, o: int) -> int:
    return o * (i + 5)


def lstm_params(i: int, o: int) -> int:
    return 4 * (o * i + o * o + o)


def lstm_flops(i: int, o: int, t: int) -> int:
    return t * (4 * o * (2 * i - 1) + 4 * o * (2 * o - 1))


def count_params_flops(spec: ModelSpec) -> tuple[int, int]:
    """Per-layer enumeration over the spec's layer map."""
    params = 0
    flops = 0
    for d in spec.layer_dims():
        if d[0] == "fc_bn":
            _, i, o = d
            params += fc_bn_params(i, o)
            flops += fc_flops(i, o)
        elif d[0] == "bilstm":
            _, i, o, t = d
            params += 2 * lstm_params(i, o)
            flops += 2 * lstm_flops(i, o, t)
        else:
            raise ConfigError(f"unknown layer kind {d[0]!r}")
    return params, flops


def _require_full_width(spec: ModelSpec):
    if spec.hidden_scale != 1.0:
        raise ConfigError("closed forms are defined for hidden_scale = 1 only")


def closed_form_params(spec: ModelSpec) -> int:
    """Published totals, rewritten in integer variables (alpha terms via L, M)."""
    _require_full_width(spec)
    nt, ns, l = spec.nt, spec.ns, spec.compressed_dim
    if spec.architecture == "imcsinet_s":
        return 576 * nt * nt + 330 * nt + 32 * l * nt + 5 * l
    if spec.architecture == "imcsinet_m":
        d = nt * ns
        return 160 * d * d + 170 * d + 16 * l * d + 5 * l
    return bi_encoder_params(nt, spec.per_subband_dim) + _m_decoder_params(nt, ns, l)


def closed_form_flops(spec: ModelSpec) -> int:
    _require_full_width(spec)
    nt, ns, l = spec.nt, spec.ns, spec.compressed_dim
    if spec.architecture == "imcsinet_s":
        return 1152 * nt * nt - 66 * nt + 64 * l * nt - l
    if spec.architecture == "imcsinet_m":
        d = nt * ns
        return 320 * d * d - 34 * d + 32 * l * d - l
    raise ConfigError("no published closed-form FLOP total for bi_imcsinet")


def _m_decoder_params(nt: int, ns: int, l: int) -> int:
    d = nt * ns
    return 80 * d * d + 90 * d + 8 * l * d


def m_encoder_params(nt: int, ns: int, l: int) -> int:
    """FC encoder total: (80+16a)(Ns*Nt)^2 + (80+10a)Ns*Nt with a = L/(2*Nt*Ns)."""
    d = nt * ns
    return 80 * d * d + 80 * d + 8 * l * d + 5 * l


def bi_encoder_params(nt: int, m: int) -> int:
    """Three bidirectional layers: 8(80Nt^2+8Nt) + 8(9Nt^2+Nt) + 8(M*Nt+M^2+M)."""
    return 712 * nt * nt + 72 * nt + 8 * m * nt + 8 * m * m + 8 * m


def bi_encoder_layer_params(nt: int, m: int) -> tuple[int, int, int]:
    """Per-layer published counts for the bidirectional encoder."""
    return (
        8 * (80 * nt * nt + 8 * nt),
        8 * (9 * nt * nt + nt),
        8 * (m * nt + m * m + m),
    )
