"""From-scratch CNN sound event classifier: layers, training, serialization."""

from .config import CnnConfig, ConvSpec, PoolSpec, TrainConfig
from .network import CnnModel, PARAM_ORDER, backward, forward, init_model, param_shapes
from .serialize import FORMAT_VERSION, load_model, save_model
from .training import (
    Prediction,
    TrainResult,
    init_velocity,
    predict_segments,
    sgd_step,
    train,
)

__all__ = [
    "CnnConfig", "ConvSpec", "PoolSpec", "TrainConfig",
    "CnnModel", "PARAM_ORDER", "backward", "forward", "init_model", "param_shapes",
    "FORMAT_VERSION", "load_model", "save_model",
    "Prediction", "TrainResult", "init_velocity", "predict_segments",
    "sgd_step", "train",
]
