"""The per-shape occupancy MLP: 27 -> 128 -> 128 -> 128 -> 1, ReLU hidden.

Forward, stable binary cross-entropy, and exact reverse-mode gradients
are written directly against the eight parameter tensors. The code is
dtype-generic (tests check gradients in float64; production runs float32).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .encoding import PeConfig, positional_encode

__all__ = [
    "MlpParams",
    "TENSOR_NAMES",
    "TENSOR_SHAPES",
    "init_params",
    "mlp_forward",
    "forward_cached",
    "backward_from_cache",
    "mlp_gradients",
    "bce_loss",
    "bce_grad",
    "sigmoid",
]

TENSOR_NAMES = ("w1", "b1", "w2", "b2", "w3", "b3", "w4", "b4")
TENSOR_SHAPES = {
    "w1": (128, 27),
    "b1": (128,),
    "w2": (128, 128),
    "b2": (128,),
    "w3": (128, 128),
    "b3": (128,),
    "w4": (1, 128),
    "b4": (1,),
}


@dataclass
class MlpParams:
    """Ordered weight/bias tensors; element counts [3456, 128, 16384, 128, 16384, 128, 128, 1]."""

    w1: np.ndarray
    b1: np.ndarray
    w2: np.ndarray
    b2: np.ndarray
    w3: np.ndarray
    b3: np.ndarray
    w4: np.ndarray
    b4: np.ndarray

    def __post_init__(self):
        for name in TENSOR_NAMES:
            arr = np.asarray(getattr(self, name))
            expected = TENSOR_SHAPES[name]
            if arr.shape != expected:
                raise ValueError(f"tensor {name} has shape {arr.shape}, expected {expected}")
            setattr(self, name, arr)

    def tensors(self) -> tuple[np.ndarray, ...]:
        return tuple(getattr(self, n) for n in TENSOR_NAMES)

    def astype(self, dtype) -> "MlpParams":
        return MlpParams(*(t.astype(dtype) for t in self.tensors()))

    def copy(self) -> "MlpParams":
        return MlpParams(*(t.copy() for t in self.tensors()))

    @property
    def n_elements(self) -> int:
        return sum(t.size for t in self.tensors())

    def check_finite(self) -> None:
        for name in TENSOR_NAMES:
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"non-finite values in tensor {name}")


def init_params(seed: int, dtype=np.float32, pe: PeConfig = PeConfig()) -> MlpParams:
    """Kaiming-style uniform fan-in init, U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
    rng = np.random.default_rng(seed)
    tensors = []
    fan_in = {"w1": pe.encoded_dim, "b1": pe.encoded_dim, "w2": 128, "b2": 128,
              "w3": 128, "b3": 128, "w4": 128, "b4": 128}
    for name in TENSOR_NAMES:
        bound = 1.0 / np.sqrt(fan_in[name])
        tensors.append(rng.uniform(-bound, bound, size=TENSOR_SHAPES[name]).astype(dtype))
    return MlpParams(*tensors)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def forward_cached(params: MlpParams, encoded: np.ndarray):
    """Forward pass on pre-encoded inputs, returning logits and the cache."""
    h1 = encoded @ params.w1.T + params.b1
    a1 = np.maximum(h1, 0)
    h2 = a1 @ params.w2.T + params.b2
    a2 = np.maximum(h2, 0)
    h3 = a2 @ params.w3.T + params.b3
    a3 = np.maximum(h3, 0)
    z = (a3 @ params.w4.T + params.b4).ravel()
    return z, (encoded, h1, a1, h2, a2, h3, a3)


def mlp_forward(params: MlpParams, points, pe: PeConfig = PeConfig()) -> np.ndarray:
    """Occupancy logits for a batch of 3D points (order-preserving)."""
    params.check_finite()
    dtype = params.w1.dtype
    encoded = positional_encode(points, pe, dtype=dtype)
    z, _ = forward_cached(params, encoded)
    return z


def backward_from_cache(params: MlpParams, cache, dz: np.ndarray) -> MlpParams:
    """Gradients of sum(dz * logits) with respect to every tensor."""
    encoded, h1, a1, h2, a2, h3, a3 = cache
    dz = dz.reshape(-1, 1).astype(a3.dtype)
    gw4 = dz.T @ a3
    gb4 = dz.sum(axis=0)
    da3 = dz @ params.w4
    dh3 = da3 * (h3 > 0)
    gw3 = dh3.T @ a2
    gb3 = dh3.sum(axis=0)
    da2 = dh3 @ params.w3
    dh2 = da2 * (h2 > 0)
    gw2 = dh2.T @ a1
    gb2 = dh2.sum(axis=0)
    da1 = dh2 @ params.w2
    dh1 = da1 * (h1 > 0)
    gw1 = dh1.T @ encoded
    gb1 = dh1.sum(axis=0)
    return MlpParams(gw1, gb1, gw2, gb2, gw3, gb3, gw4, gb4)


def bce_loss(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean binary cross-entropy from logits, log-sum-exp stable form."""
    z = np.asarray(logits, dtype=np.float64).ravel()
    o = np.asarray(labels, dtype=np.float64).ravel()
    if z.size == 0:
        raise ValueError("empty batch")
    if z.size != o.size:
        raise ValueError(f"logits ({z.size}) and labels ({o.size}) length mismatch")
    # max(z,0) - z*o + log(1 + exp(-|z|))
    return float(np.mean(np.maximum(z, 0) - z * o + np.log1p(np.exp(-np.abs(z)))))


def bce_grad(logits: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """d(mean BCE)/d(logits) = (sigmoid(z) - o) / n."""
    z = np.asarray(logits)
    o = np.asarray(labels, dtype=z.dtype)
    return (sigmoid(z) - o) / z.size


def mlp_gradients(params: MlpParams, points, labels, pe: PeConfig = PeConfig()) -> MlpParams:
    """Exact reverse-mode gradients of bce_loss(mlp_forward(points)) w.r.t. params."""
    dtype = params.w1.dtype
    encoded = positional_encode(points, pe, dtype=dtype)
    z, cache = forward_cached(params, encoded)
    return backward_from_cache(params, cache, bce_grad(z, labels))
