"""MLP checkpoint format: the interchange unit between fitting and diffusion.

Layout: 8-byte magic ``INRMLP01``, little-endian u32 JSON-header length,
the JSON header (tensor signature, positional-encoding config, training
seed, optional extras), then the raw float32 little-endian tensor data
in MlpParams order. Serialization is deterministic: sorted keys, compact
separators, no timestamps.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .encoding import PeConfig
from .mlp import MlpParams, TENSOR_NAMES, TENSOR_SHAPES

__all__ = ["MAGIC", "save_mlp", "load_mlp"]

MAGIC = b"INRMLP01"


def _signature() -> list[int]:
    return [int(np.prod(TENSOR_SHAPES[n])) for n in TENSOR_NAMES]


def save_mlp(path, params: MlpParams, pe: PeConfig = PeConfig(), seed: int | None = None,
             extras: dict | None = None) -> None:
    header = {
        "signature": _signature(),
        "pe": pe.to_dict(),
        "seed": seed,
    }
    if extras:
        header["extras"] = extras
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for t in params.tensors():
            fh.write(np.ascontiguousarray(t, dtype="<f4").tobytes())


def load_mlp(path) -> tuple[MlpParams, dict]:
    """Returns (params, header). Raises DataError on malformed files."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:8] != MAGIC:
        raise DataError(f"{path}: not an MLP checkpoint (bad magic)")
    (hlen,) = struct.unpack_from("<I", blob, 8)
    try:
        header = json.loads(blob[12 : 12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: corrupt checkpoint header: {e}") from None
    sig = header.get("signature")
    if sig != _signature():
        raise DataError(f"{path}: unexpected tensor signature {sig}")
    data = np.frombuffer(blob, dtype="<f4", offset=12 + hlen)
    if data.size != sum(sig):
        raise DataError(f"{path}: tensor payload has {data.size} values, expected {sum(sig)}")
    tensors = []
    pos = 0
    for name in TENSOR_NAMES:
        shape = TENSOR_SHAPES[name]
        n = int(np.prod(shape))
        tensors.append(data[pos : pos + n].reshape(shape).copy())
        pos += n
    return MlpParams(*tensors), header
