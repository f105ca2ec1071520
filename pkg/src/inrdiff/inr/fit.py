"""Per-shape INR fitting: sample, label, then Adam over shuffled minibatches.

One epoch is a full pass over the 40k sampled points (about 20 steps of
2048). Points and labels are drawn once per shape from the fit seed, so
the whole fit is a pure function of (mesh, config).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from ..geometry import (
    DEFAULT_EXTENT,
    OccupancyGrid,
    TriMesh,
    marching_cubes,
    occupancy_labels,
    sample_near_surface,
    sample_volume_points,
)
from .encoding import PeConfig, positional_encode
from .mlp import (
    MlpParams,
    TENSOR_NAMES,
    backward_from_cache,
    bce_grad,
    bce_loss,
    forward_cached,
    init_params,
    sigmoid,
)

__all__ = ["FitConfig", "FitResult", "AdamState", "fit_mlp", "evaluate_grid", "reconstruct"]


@dataclass(frozen=True)
class FitConfig:
    epochs: int = 1000
    minibatch: int = 2048
    volume_points: int = 20000
    surface_points: int = 20000
    surface_sigma: float = 0.02
    lr: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    pe: PeConfig = field(default_factory=PeConfig)

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "minibatch": self.minibatch,
            "volume_points": self.volume_points,
            "surface_points": self.surface_points,
            "surface_sigma": self.surface_sigma,
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "seed": self.seed,
            "pe": self.pe.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitConfig":
        d = dict(d)
        pe = PeConfig.from_dict(d.pop("pe")) if "pe" in d else PeConfig()
        return cls(pe=pe, **d)


@dataclass
class FitResult:
    params: MlpParams
    epoch_losses: list[float]
    watertight_input: bool


class AdamState:
    """Adam moment buffers for a tensor tuple (bias-corrected updates)."""

    def __init__(self, params: MlpParams | tuple, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8, weight_decay: float = 0.0):
        tensors = params.tensors() if hasattr(params, "tensors") else tuple(params)
        self.m = [np.zeros_like(t) for t in tensors]
        self.v = [np.zeros_like(t) for t in tensors]
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.weight_decay = weight_decay
        self.t = 0

    def step(self, tensors, grads) -> None:
        """Update tensors in place (AdamW decoupled decay when weight_decay > 0)."""
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bc1 = 1.0 - b1**self.t
        bc2 = 1.0 - b2**self.t
        for i, (p, g) in enumerate(zip(tensors, grads)):
            m = self.m[i]
            v = self.v[i]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * np.square(g)
            if self.weight_decay:
                p -= (self.lr * self.weight_decay) * p
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def fit_mlp(mesh: TriMesh, cfg: FitConfig = FitConfig()) -> FitResult:
    """Fit the occupancy MLP of one normalized shape.

    Labels come from winding numbers; a non-watertight mesh proceeds with
    a warning (recorded in the result). Raises NumericError if the loss
    goes non-finite.
    """
    if cfg.epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {cfg.epochs}")
    total = cfg.volume_points + cfg.surface_points
    if cfg.minibatch > total:
        raise ValueError(f"minibatch {cfg.minibatch} exceeds total points {total}")

    rng = np.random.default_rng(cfg.seed)
    pts_vol = sample_volume_points(cfg.volume_points, rng)
    pts_surf = sample_near_surface(mesh, cfg.surface_points, cfg.surface_sigma, rng)
    points = np.concatenate([pts_vol, pts_surf])

    from ..geometry import qa_report

    watertight = qa_report(mesh).watertight
    labels = occupancy_labels(mesh, points, warn_non_watertight=not watertight)
    if not watertight:
        import warnings

        warnings.warn("fitting a non-watertight mesh; labels may be noisy", RuntimeWarning)

    encoded = positional_encode(points, cfg.pe, dtype=np.float32)
    labels32 = labels.astype(np.float32)

    params = init_params(cfg.seed, dtype=np.float32, pe=cfg.pe)
    opt = AdamState(params, lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps=cfg.eps)
    tensors = params.tensors()

    losses = []
    for epoch in range(cfg.epochs):
        perm = rng.permutation(total)
        epoch_loss = 0.0
        n_steps = 0
        for start in range(0, total, cfg.minibatch):
            idx = perm[start : start + cfg.minibatch]
            x = encoded[idx]
            o = labels32[idx]
            z, cache = forward_cached(params, x)
            loss = bce_loss(z, o)
            if not np.isfinite(loss):
                raise NumericError(
                    f"BCE loss became non-finite at epoch {epoch}, step {n_steps}"
                )
            grads = backward_from_cache(params, cache, bce_grad(z, o))
            opt.step(tensors, grads.tensors())
            epoch_loss += loss
            n_steps += 1
        losses.append(epoch_loss / n_steps)
    return FitResult(params=params, epoch_losses=losses, watertight_input=watertight)


def evaluate_grid(
    params: MlpParams,
    resolution: int = 128,
    extent=DEFAULT_EXTENT,
    pe: PeConfig = PeConfig(),
    batch: int = 65536,
) -> OccupancyGrid:
    """Occupancy probabilities sigmoid(logit) on the full lattice."""
    if resolution < 2:
        raise ValueError(f"resolution must be >= 2, got {resolution}")
    grid = OccupancyGrid(resolution, np.zeros(resolution**3), extent=extent)
    pts = grid.lattice_points()
    out = np.empty(len(pts), dtype=np.float64)
    for start in range(0, len(pts), batch):
        enc = positional_encode(pts[start : start + batch], pe, dtype=params.w1.dtype)
        z, _ = forward_cached(params, enc)
        out[start : start + batch] = sigmoid(z.astype(np.float64))
    return OccupancyGrid(resolution, out.reshape((resolution,) * 3), extent=extent)


def reconstruct(
    params: MlpParams,
    resolution: int = 128,
    extent=DEFAULT_EXTENT,
    pe: PeConfig = PeConfig(),
    iso: float = 0.5,
) -> TriMesh:
    """evaluate_grid then marching cubes at iso 0.5; may return an empty mesh."""
    grid = evaluate_grid(params, resolution, extent=extent, pe=pe)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if not ((grid.values > iso).any() and (grid.values <= iso).any()):
            return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
        return marching_cubes(grid, iso=iso)
