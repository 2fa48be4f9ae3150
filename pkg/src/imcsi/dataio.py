"""Binary dataset container for channel tensors and eigen targets.

Layout (little-endian):

    magic   4 bytes  b"CSIF"
    version u32      currently 1
    kind    u32      0=channel, 1=eigen_single, 2=eigen_multi
    nt      u32
    nr      u32
    ns      u32      per-sample frequency-axis length: n_rb for channel
                     files, subband count for eigen_multi, 1 for eigen_single
    count   u64      sample count
    seed    u64      scene seed (end-to-end reproducibility anchor)
    digest  16 bytes first half of sha256 over the canonical scene text

followed by ``count`` samples of float32 interleaved real/imaginary pairs,
each sample serialized in column-major element order. Read->write
round-trips are byte-identical.
"""

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataFormatError

MAGIC = b"CSIF"
VERSION = 1
_HEADER = struct.Struct("<4sIIIIIQQ16s")

KINDS = {"channel": 0, "eigen_single": 1, "eigen_multi": 2}
KIND_NAMES = {v: k for k, v in KINDS.items()}


@dataclass
class DatasetFile:
    kind: str
    nt: int
    nr: int
    ns: int
    seed: int
    scene_digest: bytes
    samples: np.ndarray  # complex64, (count, ...) with kind-dependent shape

    @property
    def count(self) -> int:
        return self.samples.shape[0]

    def sample_shape(self) -> tuple:
        return _sample_shape(self.kind, self.nt, self.nr, self.ns)


def _sample_shape(kind: str, nt: int, nr: int, ns: int) -> tuple:
    if kind == "channel":
        return (ns, nr, nt)
    if kind == "eigen_single":
        return (nt,)
    if kind == "eigen_multi":
        return (nt, ns)
    raise DataFormatError(f"unknown dataset kind {kind!r}")


def scene_digest(scene) -> bytes:
    return hashlib.sha256(scene.canonical().encode()).digest()[:16]


def dataset_path(out_dir, prefix: str, split: str) -> Path:
    return Path(out_dir) / f"{prefix}_{split}.csif"


def write_dataset(path, kind: str, scene, samples) -> Path:
    """Serialize samples (a sequence of complex arrays) for the given scene."""
    if kind not in KINDS:
        raise ConfigError(f"unknown dataset kind {kind!r}")
    a = scene.array
    ns = scene.n_rb if kind == "channel" else (1 if kind == "eigen_single" else scene.n_subbands)
    shape = _sample_shape(kind, a.nt, a.nr, ns)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)

    header = _HEADER.pack(
        MAGIC,
        VERSION,
        KINDS[kind],
        a.nt,
        a.nr,
        ns,
        len(samples),
        scene.seed & 0xFFFFFFFFFFFFFFFF,
        scene_digest(scene),
    )
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            for s in samples:
                s = np.asarray(s)
                if kind == "eigen_single":
                    s = s.reshape(-1)
                if s.shape != shape:
                    raise ConfigError(
                        f"sample shape {s.shape} does not match {shape} for kind {kind}"
                    )
                fh.write(np.ravel(s.astype(np.complex64), order="F").tobytes())
    except OSError as exc:
        raise DataFormatError(f"failed writing dataset {path}: {exc}") from exc
    return path


def read_dataset(path) -> DatasetFile:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as exc:
        raise DataFormatError(f"failed reading dataset {path}: {exc}") from exc
    if len(blob) < _HEADER.size:
        raise DataFormatError(f"{path}: truncated header")
    magic, version, kind_code, nt, nr, ns, count, seed, digest = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise DataFormatError(f"{path}: bad magic {magic!r}")
    if version != VERSION:
        raise DataFormatError(f"{path}: unsupported version {version}")
    if kind_code not in KIND_NAMES:
        raise DataFormatError(f"{path}: unknown kind code {kind_code}")
    kind = KIND_NAMES[kind_code]
    shape = _sample_shape(kind, nt, nr, ns)
    per_sample = int(np.prod(shape))
    expected = _HEADER.size + count * per_sample * 8
    if len(blob) != expected:
        raise DataFormatError(
            f"{path}: payload length {len(blob) - _HEADER.size} does not match "
            f"{count} samples of {per_sample} complex64 elements"
        )
    flat = np.frombuffer(blob, dtype=np.complex64, offset=_HEADER.size)
    samples = np.stack(
        [np.reshape(flat[i * per_sample : (i + 1) * per_sample], shape, order="F") for i in range(count)]
    ) if count else np.zeros((0,) + shape, dtype=np.complex64)
    return DatasetFile(
        kind=kind, nt=nt, nr=nr, ns=ns, seed=seed, scene_digest=digest, samples=samples
    )


def rewrite_dataset(path, data: DatasetFile) -> Path:
    """Write a previously read file back out (round-trip support)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = _HEADER.pack(
        MAGIC,
        VERSION,
        KINDS[data.kind],
        data.nt,
        data.nr,
        data.ns,
        data.count,
        data.seed,
        data.scene_digest,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        for s in data.samples:
            fh.write(np.ravel(s, order="F").tobytes())
    return path


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
