from .denoisers import (
    GRASP_DIM,
    MLPDenoiser,
    UNetDenoiser,
    build_denoiser,
    sinusoidal_embedding,
    time_embedding,
)
from .process import check_grasp, p_sample_step, q_sample, sample, training_loss
from .schedule import DEFAULT_BETA_END, DEFAULT_BETA_START, DEFAULT_STEPS, NoiseSchedule, make_schedule
from .training import FULL_SCALE_EPOCHS, TrainConfig, TrainResult, config_hash, load_denoiser, save_denoiser, train

__all__ = [
    "GRASP_DIM", "MLPDenoiser", "NoiseSchedule", "DEFAULT_BETA_END", "DEFAULT_BETA_START", "FULL_SCALE_EPOCHS",
    "DEFAULT_STEPS", "TrainConfig", "TrainResult", "UNetDenoiser", "build_denoiser", "check_grasp", "config_hash",
    "load_denoiser", "make_schedule", "p_sample_step", "q_sample", "sample", "save_denoiser",
    "sinusoidal_embedding", "time_embedding", "train", "training_loss",
]
