"""Occupancy-field INRs: encoding, MLP forward/backward, fitting, reconstruction."""

from .checkpoint import load_mlp, save_mlp
from .encoding import PeConfig, positional_encode
from .fit import AdamState, FitConfig, FitResult, evaluate_grid, fit_mlp, reconstruct
from .mlp import (
    MlpParams,
    TENSOR_NAMES,
    TENSOR_SHAPES,
    bce_grad,
    bce_loss,
    init_params,
    mlp_forward,
    mlp_gradients,
    sigmoid,
)

__all__ = [
    "load_mlp",
    "save_mlp",
    "PeConfig",
    "positional_encode",
    "AdamState",
    "FitConfig",
    "FitResult",
    "evaluate_grid",
    "fit_mlp",
    "reconstruct",
    "MlpParams",
    "TENSOR_NAMES",
    "TENSOR_SHAPES",
    "bce_grad",
    "bce_loss",
    "init_params",
    "mlp_forward",
    "mlp_gradients",
    "sigmoid",
]
