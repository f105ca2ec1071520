"""Denoiser checkpoint format.

Layout mirrors the MLP checkpoint: 8-byte magic ``HDXFMR01``, u32 JSON
header length, JSON header (denoiser config, tensor signature, theta
stats, schedule parameters, training epoch, ordered tensor names and
shapes), then every model tensor as little-endian float32 in header
order. Writing the same state twice yields identical bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..errors import DataError
from .denoiser import Denoiser, DenoiserConfig
from .flatten import ThetaStats

__all__ = ["MAGIC", "save_denoiser", "load_denoiser"]

MAGIC = b"HDXFMR01"


def save_denoiser(
    path,
    model: Denoiser,
    stats: ThetaStats,
    schedule_params: dict,
    epoch: int = 0,
    extras: dict | None = None,
) -> None:
    names = model.param_names()
    header = {
        "config": model.cfg.to_dict(),
        "signature": list(model.signature),
        "stats": stats.to_dict(),
        "schedule": schedule_params,
        "epoch": epoch,
        "tensors": [{"name": n, "shape": list(model.params[n].shape)} for n in names],
    }
    if extras:
        header["extras"] = extras
    blob = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for n in names:
            fh.write(np.ascontiguousarray(model.params[n], dtype="<f4").tobytes())


def load_denoiser(path) -> tuple[Denoiser, ThetaStats, dict, dict]:
    """Returns (model, stats, schedule_params, header)."""
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 12 or blob[:8] != MAGIC:
        raise DataError(f"{path}: not a denoiser checkpoint (bad magic)")
    (hlen,) = struct.unpack_from("<I", blob, 8)
    try:
        header = json.loads(blob[12 : 12 + hlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise DataError(f"{path}: corrupt checkpoint header: {e}") from None
    cfg = DenoiserConfig.from_dict(header["config"])
    model = Denoiser(cfg, signature=header["signature"])
    expected = [{"name": n, "shape": list(model.params[n].shape)} for n in model.param_names()]
    if header["tensors"] != expected:
        raise DataError(f"{path}: tensor manifest does not match the declared config")
    data = np.frombuffer(blob, dtype="<f4", offset=12 + hlen)
    total = sum(model.params[n].size for n in model.param_names())
    if data.size != total:
        raise DataError(f"{path}: tensor payload has {data.size} values, expected {total}")
    pos = 0
    for n in model.param_names():
        size = model.params[n].size
        model.params[n] = data[pos : pos + size].reshape(model.params[n].shape).copy()
        pos += size
    stats = ThetaStats.from_dict(header["stats"])
    return model, stats, header["schedule"], header
