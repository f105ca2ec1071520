"""Forward noising, x0-prediction training, DDIM sampling over weight space."""

from .sampling import SampleConfig, ddim_sample, ddim_timesteps, generate
from .schedule import DiffusionSchedule, make_schedule, q_sample
from .training import TrainConfig, TrainResult, train, training_loss

__all__ = [
    "SampleConfig",
    "ddim_sample",
    "ddim_timesteps",
    "generate",
    "DiffusionSchedule",
    "make_schedule",
    "q_sample",
    "TrainConfig",
    "TrainResult",
    "train",
    "training_loss",
]
