"""Diffusion training: x0-prediction MSE with AdamW over theta datasets.

Per step every batch element draws its own uniform t in [1, T] and unit
Gaussian noise; the denoiser predicts the clean vector and the loss is
the plain MSE to it (the x0 parameterization, not epsilon-prediction).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericError
from ..inr.fit import AdamState
from ..weightspace import Denoiser, DenoiserConfig, ThetaStats, compute_stats, standardize
from .schedule import DiffusionSchedule, make_schedule, q_sample

__all__ = ["TrainConfig", "TrainResult", "training_loss", "train"]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 6000
    batch: int = 32
    lr: float = 2e-4
    weight_decay: float = 0.01
    seed: int = 0
    val_every: int = 100
    split: tuple = (0.8, 0.05, 0.15)

    def __post_init__(self):
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise ValueError(f"split ratios must sum to 1, got {self.split}")

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "batch": self.batch,
            "lr": self.lr,
            "weight_decay": self.weight_decay,
            "seed": self.seed,
            "val_every": self.val_every,
            "split": list(self.split),
        }


@dataclass
class TrainResult:
    model: Denoiser
    stats: ThetaStats
    schedule: DiffusionSchedule
    train_losses: list[float] = field(default_factory=list)
    val_losses: list[tuple[int, float]] = field(default_factory=list)
    best_val: float = np.inf
    best_params: dict | None = None


def training_loss(model: Denoiser, theta0: np.ndarray, t: np.ndarray, noise: np.ndarray,
                  sched: DiffusionSchedule, with_grads: bool = False):
    """Mean squared error between the denoised prediction and theta0.

    theta0 is expected in standardized space. Returns loss, or
    (loss, grads) when with_grads is set.
    """
    theta0 = np.atleast_2d(theta0)
    theta_t = q_sample(theta0, t, noise, sched).astype(model.params["pos_emb"].dtype)
    pred, cache = model.forward(theta_t, t)
    diff = pred.astype(np.float64) - theta0
    loss = float(np.mean(diff**2))
    if not with_grads:
        return loss
    dpred = (2.0 / diff.size) * diff
    return loss, model.backward(cache, dpred)


def train(thetas: np.ndarray, cfg: TrainConfig = TrainConfig(),
          denoiser_cfg: DenoiserConfig = DenoiserConfig(),
          sched: DiffusionSchedule | None = None,
          val_thetas: np.ndarray | None = None,
          stats: ThetaStats | None = None,
          log_fn=None) -> TrainResult:
    """Train the denoiser to reproduce the training thetas from noise.

    thetas: (n, theta_dim) raw (unstandardized) training vectors, n >= 2.
    Stats default to the scalar mean/std of the training set; validation
    loss is logged every cfg.val_every epochs and the best-validation
    parameter snapshot is kept alongside the final one.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=np.float64))
    if len(thetas) < 2:
        raise ValueError(f"need at least 2 training thetas, got {len(thetas)}")
    if sched is None:
        sched = make_schedule()
    if stats is None:
        stats = compute_stats(thetas)
    z_train = standardize(thetas, stats)
    z_val = None if val_thetas is None or len(val_thetas) == 0 else standardize(
        np.atleast_2d(np.asarray(val_thetas, dtype=np.float64)), stats
    )

    model = Denoiser(denoiser_cfg, signature=model_signature(thetas.shape[1]))
    rng = np.random.default_rng(cfg.seed)
    names = model.param_names()
    tensors = [model.params[n] for n in names]
    opt = AdamState(tensors, lr=cfg.lr, weight_decay=cfg.weight_decay)

    result = TrainResult(model=model, stats=stats, schedule=sched)
    n = len(z_train)
    batch = min(cfg.batch, n)
    for epoch in range(cfg.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        steps = 0
        for start in range(0, n, batch):
            idx = perm[start : start + batch]
            th0 = z_train[idx]
            t = rng.integers(1, sched.T + 1, size=len(idx))
            eps = rng.standard_normal(th0.shape)
            loss, grads = training_loss(model, th0, t, eps, sched, with_grads=True)
            if not np.isfinite(loss):
                raise NumericError(f"diffusion loss non-finite at epoch {epoch}, step {steps}")
            opt.step(tensors, [grads[k] for k in names])
            epoch_loss += loss
            steps += 1
        result.train_losses.append(epoch_loss / steps)

        if z_val is not None and (epoch + 1) % cfg.val_every == 0:
            t = rng.integers(1, sched.T + 1, size=len(z_val))
            eps = rng.standard_normal(z_val.shape)
            vloss = training_loss(model, z_val, t, eps, sched)
            result.val_losses.append((epoch + 1, vloss))
            if vloss < result.best_val:
                result.best_val = vloss
                result.best_params = {k: v.copy() for k, v in model.params.items()}
        if log_fn is not None:
            log_fn(epoch, result)
    return result


def model_signature(theta_dim: int):
    """Signature for the fixed MLP layout; rejects unknown dimensions."""
    from ..weightspace import SHAPE_SIGNATURE, THETA_DIM

    if theta_dim != THETA_DIM:
        raise ValueError(f"theta dimension {theta_dim} does not match the MLP layout {THETA_DIM}")
    return SHAPE_SIGNATURE
