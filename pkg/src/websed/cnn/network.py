"""Model assembly: parameter init, forward pass, loss and gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datasets import LabelVocabulary
from ..errors import ShapeMismatch
from ..features import ChannelStats
from .config import CnnConfig
from . import layers

# Serialization and velocity-state order for every parameter tensor.
PARAM_ORDER = (
    "conv1_w", "conv1_b", "conv2_w", "conv2_b",
    "fc1_w", "fc1_b", "fc2_w", "fc2_b", "out_w", "out_b",
)


@dataclass
class CnnModel:
    config: CnnConfig
    vocabulary: LabelVocabulary
    norm_stats: ChannelStats | None
    params: dict[str, np.ndarray]

    @property
    def dtype(self):
        return self.params["conv1_w"].dtype

    def copy_params(self) -> dict[str, np.ndarray]:
        return {k: v.copy() for k, v in self.params.items()}


def param_shapes(config: CnnConfig) -> dict[str, tuple[int, ...]]:
    _, _, cin = config.input_shape
    c1, c2 = config.conv1, config.conv2
    return {
        "conv1_w": (*c1.kernel, cin, c1.filters),
        "conv1_b": (c1.filters,),
        "conv2_w": (*c2.kernel, c1.filters, c2.filters),
        "conv2_b": (c2.filters,),
        "fc1_w": (config.flat_dim, config.fc_width),
        "fc1_b": (config.fc_width,),
        "fc2_w": (config.fc_width, config.fc_width),
        "fc2_b": (config.fc_width,),
        "out_w": (config.fc_width, config.num_classes),
        "out_b": (config.num_classes,),
    }


def init_model(
    config: CnnConfig,
    vocabulary: LabelVocabulary,
    norm_stats: ChannelStats | None = None,
    rng: np.random.Generator | int = 0,
    dtype=np.float32,
) -> CnnModel:
    """He-uniform weights for the ReLU layers, Glorot for the softmax output."""
    if vocabulary.class_count != config.num_classes:
        raise ShapeMismatch(
            f"vocabulary has {vocabulary.class_count} labels, config expects "
            f"{config.num_classes} classes")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    shapes = param_shapes(config)
    params: dict[str, np.ndarray] = {}
    for name, shape in shapes.items():
        if name.endswith("_b"):
            params[name] = np.zeros(shape, dtype=dtype)
            continue
        fan_in = int(np.prod(shape[:-1]))
        if name == "out_w":
            limit = np.sqrt(6.0 / (fan_in + shape[-1]))
        else:
            limit = np.sqrt(6.0 / fan_in)
        params[name] = rng.uniform(-limit, limit, size=shape).astype(dtype)
    return CnnModel(config=config, vocabulary=vocabulary,
                    norm_stats=norm_stats, params=params)


def _check_batch(config: CnnConfig, batch: np.ndarray) -> None:
    if batch.ndim != 4 or tuple(batch.shape[1:]) != tuple(config.input_shape):
        raise ShapeMismatch(
            f"batch shape {batch.shape}, expected [B, {config.input_shape}]")


def _forward_stages(model: CnnModel, x: np.ndarray, train: bool,
                    rng: np.random.Generator | None):
    """Logits plus per-stage caches. Dropout only in train mode, FC layers only."""
    cfg, p = model.config, model.params
    cache: dict = {}
    a, cache["conv1"] = layers.conv2d_forward(x, p["conv1_w"], p["conv1_b"], cfg.conv1.stride)
    a, cache["relu1"] = layers.relu_forward(a)
    a, cache["pool1"] = layers.maxpool_forward(a, cfg.pool1.shape, cfg.pool1.stride)
    a, cache["conv2"] = layers.conv2d_forward(a, p["conv2_w"], p["conv2_b"], cfg.conv2.stride)
    a, cache["relu2"] = layers.relu_forward(a)
    a, cache["pool2"] = layers.maxpool_forward(a, cfg.pool2.shape, cfg.pool2.stride)
    cache["pool2_shape"] = a.shape
    a = a.reshape(a.shape[0], -1)

    a, cache["fc1"] = layers.dense_forward(a, p["fc1_w"], p["fc1_b"])
    a, cache["relu3"] = layers.relu_forward(a)
    use_dropout = train and cfg.dropout_p > 0.0
    if use_dropout:
        a, cache["drop1"] = layers.dropout_forward(a, cfg.dropout_p, rng)
    a, cache["fc2"] = layers.dense_forward(a, p["fc2_w"], p["fc2_b"])
    a, cache["relu4"] = layers.relu_forward(a)
    if use_dropout:
        a, cache["drop2"] = layers.dropout_forward(a, cfg.dropout_p, rng)
    logits, cache["out"] = layers.dense_forward(a, p["out_w"], p["out_b"])
    return logits, cache


def forward(model: CnnModel, batch: np.ndarray, mode: str = "infer",
            rng: np.random.Generator | None = None) -> np.ndarray:
    """Class posteriors [B, num_classes]; `mode` is "train" or "infer"."""
    if mode not in ("train", "infer"):
        raise ValueError(f"mode must be 'train' or 'infer', got {mode!r}")
    _check_batch(model.config, batch)
    x = np.ascontiguousarray(batch, dtype=model.dtype)
    if mode == "train" and rng is None:
        rng = np.random.default_rng(0)
    logits, _ = _forward_stages(model, x, mode == "train", rng)
    return layers.softmax(logits)


def backward(model: CnnModel, batch: np.ndarray, one_hot: np.ndarray,
             l2: float = 0.0, rng: np.random.Generator | None = None):
    """Loss (mean cross-entropy + l2 * sum ||W||^2) and gradients per parameter.

    Runs the train-mode forward pass itself, recording activations and
    dropout masks, then backpropagates through them.
    """
    _check_batch(model.config, batch)
    p = model.params
    if one_hot.shape != (batch.shape[0], model.config.num_classes):
        raise ShapeMismatch(
            f"one_hot shape {one_hot.shape}, expected "
            f"({batch.shape[0]}, {model.config.num_classes})")
    x = np.ascontiguousarray(batch, dtype=model.dtype)
    one_hot = np.asarray(one_hot, dtype=model.dtype)
    if rng is None:
        rng = np.random.default_rng(0)

    logits, cache = _forward_stages(model, x, train=True, rng=rng)
    loss, _, dlogits = layers.softmax_cross_entropy(logits, one_hot)

    grads: dict[str, np.ndarray] = {}
    da, grads["out_w"], grads["out_b"] = layers.dense_backward(dlogits, cache["out"], p["out_w"])
    if "drop2" in cache:
        da = layers.dropout_backward(da, cache["drop2"])
    da = layers.relu_backward(da, cache["relu4"])
    da, grads["fc2_w"], grads["fc2_b"] = layers.dense_backward(da, cache["fc2"], p["fc2_w"])
    if "drop1" in cache:
        da = layers.dropout_backward(da, cache["drop1"])
    da = layers.relu_backward(da, cache["relu3"])
    da, grads["fc1_w"], grads["fc1_b"] = layers.dense_backward(da, cache["fc1"], p["fc1_w"])

    da = da.reshape(cache["pool2_shape"])
    da = layers.maxpool_backward(da, cache["pool2"])
    da = layers.relu_backward(da, cache["relu2"])
    da, grads["conv2_w"], grads["conv2_b"] = layers.conv2d_backward(da, cache["conv2"])
    da = layers.maxpool_backward(da, cache["pool1"])
    da = layers.relu_backward(da, cache["relu1"])
    _, grads["conv1_w"], grads["conv1_b"] = layers.conv2d_backward(da, cache["conv1"])

    if l2 > 0.0:
        for name in PARAM_ORDER:
            if name.endswith("_w"):
                loss += l2 * float((p[name].astype(np.float64) ** 2).sum())
                grads[name] = grads[name] + 2.0 * l2 * p[name]
    return float(loss), grads
