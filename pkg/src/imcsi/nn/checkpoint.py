"""Model checkpoints: JSON metadata header + named float32 blocks.

Layout (little-endian): magic b"CSIC", u32 version, u32 header length,
UTF-8 JSON header, then the raw float32 blocks in header order. The header
records the model spec (architecture, dims, quantizer, LeakyReLU slope,
hidden scale), the init seed, and the name/shape index of every block,
covering both trained parameters and batch-norm running statistics.
"""

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataFormatError
from ..quantizers import QuantizerSpec
from .models import FeedbackModel, ModelSpec

MAGIC = b"CSIC"
VERSION = 1


def save_checkpoint(path, model: FeedbackModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blocks = [(name, arr) for name, _, _, arr in model.named_params()]
    blocks += [(name, arr) for name, _, _, arr in model.named_state()]
    spec = model.spec
    header = {
        "architecture": spec.architecture,
        "nt": spec.nt,
        "ns": spec.ns,
        "compressed_dim": spec.compressed_dim,
        "quantizer_kind": spec.quantizer.kind,
        "quantizer_bits": spec.quantizer.bits,
        "leaky_slope": spec.leaky_slope,
        "hidden_scale": spec.hidden_scale,
        "init_seed": model.init_seed,
        "blocks": [{"name": n, "shape": list(a.shape)} for n, a in blocks],
    }
    payload = json.dumps(header, sort_keys=True).encode()
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, len(payload)))
        fh.write(payload)
        for _, arr in blocks:
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    return path


def load_checkpoint(path) -> FeedbackModel:
    path = Path(path)
    blob = path.read_bytes()
    if blob[:4] != MAGIC:
        raise DataFormatError(f"{path}: not a checkpoint file")
    version, hlen = struct.unpack_from("<II", blob, 4)
    if version != VERSION:
        raise DataFormatError(f"{path}: unsupported checkpoint version {version}")
    try:
        header = json.loads(blob[12 : 12 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"{path}: corrupt checkpoint header") from exc

    spec = ModelSpec(
        architecture=header["architecture"],
        nt=header["nt"],
        ns=header["ns"],
        compressed_dim=header["compressed_dim"],
        quantizer=QuantizerSpec(header["quantizer_kind"], header["quantizer_bits"]),
        leaky_slope=header["leaky_slope"],
        hidden_scale=header["hidden_scale"],
    )
    model = FeedbackModel(spec, init_seed=header["init_seed"])

    offset = 12 + hlen
    loaded = {}
    for block in header["blocks"]:
        shape = tuple(block["shape"])
        size = int(np.prod(shape)) if shape else 1
        raw = blob[offset : offset + 4 * size]
        if len(raw) != 4 * size:
            raise DataFormatError(f"{path}: truncated block {block['name']}")
        loaded[block["name"]] = np.frombuffer(raw, dtype="<f4").reshape(shape).copy()
        offset += 4 * size
    if offset != len(blob):
        raise DataFormatError(f"{path}: {len(blob) - offset} trailing bytes")

    expected = {name for name, _, _, _ in model.named_params()}
    expected |= {name for name, _, _, _ in model.named_state()}
    if expected != set(loaded):
        raise DataFormatError(f"{path}: checkpoint blocks do not match the architecture")
    model.restore(loaded)
    return model
