"""Forward-diffusion schedule: linear betas, cumulative-product alpha bars."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DiffusionSchedule", "make_schedule", "q_sample"]


@dataclass(frozen=True)
class DiffusionSchedule:
    """Tables indexed by t-1 for t in [1, T]."""

    betas: np.ndarray
    alphas: np.ndarray
    alpha_bars: np.ndarray

    @property
    def T(self) -> int:
        return len(self.betas)

    def alpha_bar(self, t) -> np.ndarray:
        """alpha_bar_t for integer steps t in [1, T] (t=0 means the data itself: 1)."""
        t = np.asarray(t)
        out = np.where(t > 0, self.alpha_bars[np.maximum(t, 1) - 1], 1.0)
        return out if out.ndim else float(out)

    def params_dict(self) -> dict:
        return {
            "T": self.T,
            "beta_min": float(self.betas[0]),
            "beta_max": float(self.betas[-1]),
            "kind": "linear",
        }


def make_schedule(T: int = 1000, beta_min: float = 1e-4, beta_max: float = 0.02) -> DiffusionSchedule:
    """Linear beta interpolation over T steps."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if not (0 < beta_min < beta_max < 1):
        raise ValueError(f"need 0 < beta_min < beta_max < 1, got {beta_min}, {beta_max}")
    betas = np.linspace(beta_min, beta_max, T, dtype=np.float64)
    alphas = 1.0 - betas
    return DiffusionSchedule(betas=betas, alphas=alphas, alpha_bars=np.cumprod(alphas))


def q_sample(theta0: np.ndarray, t, noise: np.ndarray, sched: DiffusionSchedule) -> np.ndarray:
    """Forward noising: theta_t = sqrt(ab_t) * theta0 + sqrt(1 - ab_t) * eps."""
    theta0 = np.asarray(theta0)
    noise = np.asarray(noise)
    if noise.shape != theta0.shape:
        raise ValueError(f"noise shape {noise.shape} != theta shape {theta0.shape}")
    ab = np.asarray(sched.alpha_bar(t), dtype=np.float64)
    if theta0.ndim == 2:
        ab = ab.reshape(-1, 1)
    return np.sqrt(ab) * theta0 + np.sqrt(1.0 - ab) * noise
