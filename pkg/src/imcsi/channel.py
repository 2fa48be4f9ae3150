"""Clustered multipath channel synthesis at desk scale.

Each drop is one cluster of ``n_paths`` rays around per-drop departure and
arrival centers. Ray p contributes a rank-1 term

    g_p * exp(-j*2*pi*(carrier + f_rb)*tau_p) * a_rx(p) a_tx(p)^H

per RB, with f_rb = rb_index * 180 kHz, delays exponential with the
configured spread (and matching exponential power-delay profile), ray
angles Laplacian around the cluster center, and a random unit polarization
mixing phase between the two slant polarizations of the panel. The sample
is scaled so the average per-entry power over the whole tensor is 1.

Every drop is a pure function of (scene.seed, drop_index): the per-drop
stream key is derive_key(seed, drop_index) and the draw order below is
fixed (centers, delays, gains, departure offsets, zenith offsets, arrival
offsets, polarization phases).
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .accel import accumulate_paths
from .beams import ArrayConfig, steering_vector
from .eigen import EigenTarget, dominant_right_singular_vector, subband_eigenvectors
from .errors import ConfigError
from .rng import RandomStream, derive_key

RB_BANDWIDTH_HZ = 180e3

# reserved sub-stream index for dataset shuffling ("SHUF" as an integer),
# far above any realistic drop index
SHUFFLE_STREAM_INDEX = 0x53485546 << 32


@dataclass(frozen=True)
class SceneConfig:
    array: ArrayConfig
    n_rb: int
    n_subbands: int
    seed: int
    n_paths: int = 20
    delay_spread: float = 300e-9
    carrier_hz: float = 3.5e9
    angle_spread: float = 0.2

    def __post_init__(self):
        if self.n_rb < 1 or self.n_subbands < 1:
            raise ConfigError("n_rb and n_subbands must be >= 1")
        if self.n_rb % self.n_subbands != 0:
            raise ConfigError(
                f"n_rb={self.n_rb} not divisible by n_subbands={self.n_subbands}"
            )
        if self.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        if not self.delay_spread > 0:
            raise ConfigError("delay_spread must be > 0")
        if not self.carrier_hz > 0:
            raise ConfigError("carrier_hz must be > 0")
        if self.angle_spread < 0:
            raise ConfigError("angle_spread must be >= 0")

    @property
    def mode(self) -> str:
        return "single_rb" if self.n_rb == 1 else "multi_rb"

    def canonical(self) -> str:
        a = self.array
        return (
            f"n1={a.n1} n2={a.n2} o1={a.o1} o2={a.o2} nr={a.nr} "
            f"n_rb={self.n_rb} n_subbands={self.n_subbands} n_paths={self.n_paths} "
            f"delay_spread={self.delay_spread!r} carrier_hz={self.carrier_hz!r} "
            f"angle_spread={self.angle_spread!r} seed={self.seed}"
        )

    @property
    def scene_id(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:12]


@dataclass
class ChannelSample:
    h: np.ndarray  # (n_rb, nr, nt) complex128
    seed_used: int
    scene_id: str


def _rx_response(nr: int, azimuths: np.ndarray) -> np.ndarray:
    """Half-wavelength ULA response at the receiver, one row per ray."""
    idx = np.arange(nr)
    return np.exp(1j * np.pi * np.sin(azimuths)[:, None] * idx[None, :])


def synth_channel(scene: SceneConfig, drop_index: int) -> ChannelSample:
    """Generate the (n_rb, nr, nt) channel tensor for one drop."""
    if drop_index < 0:
        raise ConfigError(f"drop_index must be >= 0, got {drop_index}")
    key = derive_key(scene.seed, drop_index)
    stream = RandomStream(key)
    p = scene.n_paths

    centers = stream.uniform(3)
    az_tx0 = np.pi * (centers[0] - 0.5)
    zen_tx0 = np.pi / 3.0 + centers[1] * np.pi / 3.0
    az_rx0 = np.pi * (centers[2] - 0.5)

    taus = stream.exponential(p, scene.delay_spread)
    gains = stream.complex_normal(p) * np.sqrt(np.exp(-taus / scene.delay_spread))
    az_tx = az_tx0 + stream.laplace(p, scene.angle_spread)
    zen_tx = zen_tx0 + stream.laplace(p, scene.angle_spread / 2.0)
    az_rx = az_rx0 + stream.laplace(p, scene.angle_spread)
    pol_phase = np.exp(2j * np.pi * stream.uniform(p))

    a_tx = np.empty((p, scene.array.nt), dtype=np.complex128)
    half = scene.array.n_ports
    for i in range(p):
        a_tx[i, :half] = steering_vector(scene.array, az_tx[i], zen_tx[i], 0)
        a_tx[i, half:] = pol_phase[i] * steering_vector(scene.array, az_tx[i], zen_tx[i], 1)
    a_rx = _rx_response(scene.array.nr, az_rx)

    freqs = scene.carrier_hz + RB_BANDWIDTH_HZ * np.arange(scene.n_rb)
    coeff = gains[None, :] * np.exp(-2j * np.pi * freqs[:, None] * taus[None, :])

    h = accumulate_paths(coeff, a_rx, np.conj(a_tx))
    h *= np.sqrt(h.size / np.sum(np.abs(h) ** 2))
    return ChannelSample(h=h, seed_used=key, scene_id=scene.scene_id)


def extract_target(scene: SceneConfig, sample: ChannelSample, drop_index: int) -> EigenTarget:
    """Eigen feedback target of one channel sample, mode chosen by the scene."""
    sid = f"{sample.scene_id}:{drop_index}"
    if scene.mode == "single_rb":
        v, _ = dominant_right_singular_vector(sample.h[0])
        return EigenTarget(mode="single_rb", matrix=v, sample_id=sid)
    return subband_eigenvectors(sample.h, scene.n_subbands, sample_id=sid)


def split_counts(count: int, split: tuple[float, float, float]) -> tuple[int, int, int]:
    """Train/val/test sizes; val and test round down, train takes the remainder."""
    if count < 0:
        raise ConfigError(f"count must be >= 0, got {count}")
    if len(split) != 3 or any(f < 0 for f in split):
        raise ConfigError(f"split must be three non-negative fractions, got {split}")
    if abs(sum(split) - 1.0) > 1e-9:
        raise ConfigError(f"split fractions must sum to 1, got {split}")
    n_val = int(np.floor(split[1] * count))
    n_test = int(np.floor(split[2] * count))
    return count - n_val - n_test, n_val, n_test


@dataclass
class DatasetBuild:
    """Paths and sample counts produced by :func:`synth_dataset`."""

    eigen_paths: dict
    channel_paths: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)


def synth_dataset(
    scene: SceneConfig,
    count: int,
    split: tuple[float, float, float],
    out_dir,
    prefix: str = "dataset",
    save_channels: bool = False,
) -> DatasetBuild:
    """Generate ``count`` drops, shuffle, split, and persist eigen targets.

    Always writes one eigen file per split; channel tensors are written too
    when ``save_channels`` is set. Regeneration from the same scene yields
    byte-identical files.
    """
    from . import dataio  # local import: dataio is format-only plumbing

    n_train, n_val, n_test = split_counts(count, split)
    order = RandomStream(derive_key(scene.seed, SHUFFLE_STREAM_INDEX)).permutation(count)
    groups = {
        "train": order[:n_train],
        "val": order[n_train : n_train + n_val],
        "test": order[n_train + n_val :],
    }

    out = DatasetBuild(eigen_paths={}, channel_paths={}, counts={})
    for name, indices in groups.items():
        targets = []
        channels = []
        for drop in indices:
            sample = synth_channel(scene, int(drop))
            targets.append(extract_target(scene, sample, int(drop)).matrix)
            if save_channels:
                channels.append(sample.h)
        kind = "eigen_single" if scene.mode == "single_rb" else "eigen_multi"
        path = dataio.dataset_path(out_dir, prefix, name)
        dataio.write_dataset(path, kind, scene, targets)
        out.eigen_paths[name] = path
        out.counts[name] = len(targets)
        if save_channels:
            cpath = dataio.dataset_path(out_dir, prefix + "_channel", name)
            dataio.write_dataset(cpath, "channel", scene, channels)
            out.channel_paths[name] = cpath
    return out
