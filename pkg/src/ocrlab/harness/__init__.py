"""Training, prediction, model files, experiment matrices and timing."""

from .experiment import ExperimentReport, run_experiment
from .model_io import dumps_model, load_model, loads_model, save_model
from .timing import time_report, timing_csv
from .training import (
    PRESET_ITERATIONS,
    FoldModel,
    TrainConfig,
    cross_fold_train,
    load_prob_matrices,
    predict,
    preset_iterations,
    save_prob_matrices,
    train_fold,
)

__all__ = [
    "PRESET_ITERATIONS",
    "ExperimentReport",
    "FoldModel",
    "TrainConfig",
    "cross_fold_train",
    "dumps_model",
    "load_model",
    "load_prob_matrices",
    "loads_model",
    "predict",
    "preset_iterations",
    "run_experiment",
    "save_model",
    "save_prob_matrices",
    "time_report",
    "timing_csv",
    "train_fold",
]
