"""Weight flattening/tokenization and the transformer denoiser."""

from .checkpoint import load_denoiser, save_denoiser
from .denoiser import Denoiser, DenoiserConfig, timestep_embedding
from .flatten import (
    SHAPE_SIGNATURE,
    THETA_DIM,
    ThetaStats,
    compute_stats,
    destandardize,
    flatten_params,
    standardize,
    unflatten_params,
)

__all__ = [
    "load_denoiser",
    "save_denoiser",
    "Denoiser",
    "DenoiserConfig",
    "timestep_embedding",
    "SHAPE_SIGNATURE",
    "THETA_DIM",
    "ThetaStats",
    "compute_stats",
    "destandardize",
    "flatten_params",
    "standardize",
    "unflatten_params",
]
