"""Flattening MLP weights to 1D vectors and global scalar standardization.

The flattened layout concatenates the eight tensors in signature order
[3456, 128, 16384, 128, 16384, 128, 128, 1] (row-major within tensors)
for a total of 36737 values. Standardization is a single (mean, std)
over every dimension of every training vector: a scalar transform keeps
relative within-layer structure intact while bringing the data to the
unit scale diffusion assumes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..inr.mlp import MlpParams, TENSOR_NAMES, TENSOR_SHAPES

__all__ = [
    "SHAPE_SIGNATURE",
    "THETA_DIM",
    "ThetaStats",
    "flatten_params",
    "unflatten_params",
    "standardize",
    "destandardize",
    "compute_stats",
]

SHAPE_SIGNATURE = tuple(int(np.prod(TENSOR_SHAPES[n])) for n in TENSOR_NAMES)
THETA_DIM = sum(SHAPE_SIGNATURE)  # 36737


@dataclass(frozen=True)
class ThetaStats:
    """Scalar mean/std over all dimensions of all training thetas."""

    mean: float
    std: float

    def __post_init__(self):
        if not (self.std > 0):
            raise ValueError(f"std must be > 0, got {self.std}")

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std}

    @classmethod
    def from_dict(cls, d: dict) -> "ThetaStats":
        return cls(float(d["mean"]), float(d["std"]))


def flatten_params(params: MlpParams) -> np.ndarray:
    """Concatenate tensors in signature order; inverse of unflatten_params."""
    for name in TENSOR_NAMES:
        got = np.asarray(getattr(params, name)).shape
        if got != TENSOR_SHAPES[name]:
            raise ValueError(f"tensor {name} has shape {got}, expected {TENSOR_SHAPES[name]}")
    return np.concatenate([np.asarray(getattr(params, n)).ravel() for n in TENSOR_NAMES])


def unflatten_params(theta: np.ndarray, signature=SHAPE_SIGNATURE) -> MlpParams:
    theta = np.asarray(theta).ravel()
    if tuple(signature) != SHAPE_SIGNATURE:
        raise ValueError(f"unsupported signature {signature}, expected {SHAPE_SIGNATURE}")
    if theta.size != THETA_DIM:
        raise ValueError(f"theta has {theta.size} values, expected {THETA_DIM}")
    tensors = []
    pos = 0
    for name, count in zip(TENSOR_NAMES, SHAPE_SIGNATURE):
        tensors.append(theta[pos : pos + count].reshape(TENSOR_SHAPES[name]).copy())
        pos += count
    return MlpParams(*tensors)


def compute_stats(thetas: np.ndarray) -> ThetaStats:
    """Scalar stats over a (n, 36737) training matrix."""
    thetas = np.asarray(thetas, dtype=np.float64)
    std = float(thetas.std())
    if std == 0:
        raise ValueError("degenerate theta set: zero variance")
    return ThetaStats(mean=float(thetas.mean()), std=std)


def standardize(theta: np.ndarray, stats: ThetaStats) -> np.ndarray:
    return (np.asarray(theta) - stats.mean) / stats.std


def destandardize(theta: np.ndarray, stats: ThetaStats) -> np.ndarray:
    return np.asarray(theta) * stats.std + stats.mean
