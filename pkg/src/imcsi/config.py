"""Line-oriented key = value experiment configuration.

Files are ini-style: `[section]` headers and `key = value` lines, parsed
with :mod:`configparser` (no interpolation, `#` comments). Sections:
[scene] is required; [dataset], [type2], [model], [train], [report] are
optional with the defaults below.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .beams import ArrayConfig
from .channel import SceneConfig
from .errors import ConfigError
from .nn.models import ModelSpec
from .nn.training import TrainConfig
from .quantizers import QuantizerSpec
from .type2 import Type2Config


@dataclass
class DatasetOptions:
    count: int = 1000
    split: tuple = (0.8, 0.1, 0.1)
    prefix: str = "dataset"
    save_channels: bool = False


@dataclass
class ModelOptions:
    """Raw [model] section; resolved into a ModelSpec against a scene."""

    architecture: str = "imcsinet_s"
    quantizer_kind: str = ""  # default depends on architecture
    quantizer_bits: int = 0
    compressed_dim: int = 0
    n_bits: int = 0
    alpha: float = 0.0
    leaky_slope: float = 0.3
    hidden_scale: float = 1.0
    init_seed: int = 1


@dataclass
class ExperimentConfig:
    scene: SceneConfig
    dataset: DatasetOptions = field(default_factory=DatasetOptions)
    type2: Type2Config = field(default_factory=Type2Config)
    model: ModelOptions = field(default_factory=ModelOptions)
    train: TrainConfig = field(default_factory=TrainConfig)
    report_format: str = "csv"

    def model_spec(self, n_bits: int = 0) -> ModelSpec:
        """Resolve the [model] section, optionally overriding total bits."""
        opts = self.model
        kind = opts.quantizer_kind or (
            "binarize" if opts.architecture == "imcsinet_s" else "uniform"
        )
        bits = opts.quantizer_bits or (1 if kind == "binarize" else 2)
        quant = QuantizerSpec(kind, bits)
        ns = 1 if opts.architecture == "imcsinet_s" else self.scene.n_subbands
        nt = self.scene.array.nt
        common = dict(
            quantizer=quant, leaky_slope=opts.leaky_slope, hidden_scale=opts.hidden_scale
        )
        total = n_bits or opts.n_bits
        if total:
            if total % quant.bits != 0:
                raise ConfigError(
                    f"n_bits={total} is not a multiple of {quant.bits} quantizer bits"
                )
            return ModelSpec(opts.architecture, nt, ns, total // quant.bits, **common)
        if opts.compressed_dim:
            return ModelSpec(opts.architecture, nt, ns, opts.compressed_dim, **common)
        if opts.alpha:
            return ModelSpec.from_alpha(opts.architecture, nt, ns, opts.alpha, **common)
        raise ConfigError("[model] needs one of n_bits, compressed_dim, or alpha")


def _get(section, key, conv, default):
    if section is None or key not in section:
        return default
    raw = section[key]
    try:
        if conv is bool:
            if raw.strip().lower() in ("1", "true", "yes", "on"):
                return True
            if raw.strip().lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc


def load_config(path, seed_override: int = None) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if "scene" not in parser:
        raise ConfigError(f"{path}: missing required [scene] section")

    sc = parser["scene"]
    array = ArrayConfig(
        n1=_get(sc, "n1", int, 2),
        n2=_get(sc, "n2", int, 2),
        o1=_get(sc, "o1", int, 4),
        o2=_get(sc, "o2", int, 4),
        nr=_get(sc, "nr", int, 2),
    )
    seed = seed_override if seed_override is not None else _get(sc, "seed", int, 1)
    scene = SceneConfig(
        array=array,
        n_rb=_get(sc, "n_rb", int, 1),
        n_subbands=_get(sc, "n_subbands", int, 1),
        n_paths=_get(sc, "n_paths", int, 20),
        delay_spread=_get(sc, "delay_spread", float, 300e-9),
        carrier_hz=_get(sc, "carrier_hz", float, 3.5e9),
        angle_spread=_get(sc, "angle_spread", float, 0.2),
        seed=seed,
    )

    ds = parser["dataset"] if "dataset" in parser else None
    if ds is not None and "split" in ds:
        try:
            split = tuple(float(f) for f in ds["split"].split())
        except ValueError as exc:
            raise ConfigError(f"bad split fractions: {ds['split']!r}") from exc
    else:
        split = (0.8, 0.1, 0.1)
    dataset = DatasetOptions(
        count=_get(ds, "count", int, 1000),
        split=split,
        prefix=_get(ds, "prefix", str, "dataset"),
        save_channels=_get(ds, "save_channels", bool, False),
    )

    t2s = parser["type2"] if "type2" in parser else None
    type2 = Type2Config(
        k_beams=_get(t2s, "k_beams", int, 4),
        phase_mode=_get(t2s, "phase_mode", str, "qpsk").lower(),
        subband_amplitude=_get(t2s, "subband_amplitude", bool, False),
    )

    ms = parser["model"] if "model" in parser else None
    model = ModelOptions(
        architecture=_get(ms, "architecture", str, "imcsinet_s"),
        quantizer_kind=_get(ms, "quantizer", str, ""),
        quantizer_bits=_get(ms, "bits", int, 0),
        compressed_dim=_get(ms, "compressed_dim", int, 0),
        n_bits=_get(ms, "n_bits", int, 0),
        alpha=_get(ms, "alpha", float, 0.0),
        leaky_slope=_get(ms, "leaky_slope", float, 0.3),
        hidden_scale=_get(ms, "hidden_scale", float, 1.0),
        init_seed=_get(ms, "init_seed", int, 1),
    )

    ts = parser["train"] if "train" in parser else None
    train = TrainConfig(
        batch_size=_get(ts, "batch_size", int, 256),
        epochs=_get(ts, "epochs", int, 200),
        initial_lr=_get(ts, "lr", float, 1e-3),
        plateau_patience=_get(ts, "patience", int, 50),
        lr_factor=_get(ts, "lr_factor", float, 0.5),
        seed=_get(ts, "seed", int, seed),
    )

    rs = parser["report"] if "report" in parser else None
    report_format = _get(rs, "format", str, "csv").lower()
    if report_format not in ("csv", "json"):
        raise ConfigError(f"report format must be csv or json, got {report_format!r}")

    return ExperimentConfig(
        scene=scene, dataset=dataset, type2=type2, model=model, train=train,
        report_format=report_format,
    )
