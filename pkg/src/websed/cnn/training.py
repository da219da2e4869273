"""Mini-batch SGD driver with Nesterov momentum, and batched inference."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..datasets import LabelVocabulary
from ..errors import EmptyTrainingSet, ShapeMismatch
from ..features import ChannelStats, FeaturePatch
from .config import CnnConfig, TrainConfig
from .network import CnnModel, forward, backward, init_model

log = logging.getLogger(__name__)


@dataclass
class Prediction:
    segment_id: str
    probabilities: np.ndarray
    predicted_class: str
    confidence: float


def init_velocity(model: CnnModel) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in model.params.items()}


def sgd_step(model: CnnModel, grads: dict[str, np.ndarray],
             velocity: dict[str, np.ndarray], cfg: TrainConfig) -> None:
    """Nesterov momentum update in the lookahead parameterization.

    The stored parameters are the lookahead point theta + mu * v, so the
    gradient is evaluated exactly where classical Nesterov requires:

        v <- mu * v - lr * g
        theta_stored <- theta_stored + mu * v - lr * g

    With momentum 0 this reduces to plain SGD. Updates happen in place.
    """
    lr, mu = cfg.learning_rate, cfg.momentum
    for name, g in grads.items():
        v = velocity[name]
        v *= mu
        v -= lr * g
        if mu > 0.0:
            model.params[name] += mu * v - lr * g
        else:
            model.params[name] += v


def _to_arrays(patch_set, vocabulary: LabelVocabulary, dtype):
    x = np.stack([p.values for p, _ in patch_set]).astype(dtype)
    y = np.array([vocabulary.index_of(label) for _, label in patch_set], dtype=np.int64)
    return x, y


def _accuracy(model: CnnModel, x: np.ndarray, y: np.ndarray, batch_size: int = 256) -> float:
    correct = 0
    for lo in range(0, len(x), batch_size):
        probs = forward(model, x[lo:lo + batch_size], mode="infer")
        correct += int((probs.argmax(axis=1) == y[lo:lo + batch_size]).sum())
    return correct / len(x)


@dataclass
class TrainResult:
    model: CnnModel
    log: list[dict]  # rows of epoch, train_loss, val_acc


def train(
    train_set: list[tuple[FeaturePatch, str]],
    val_set: list[tuple[FeaturePatch, str]],
    cfg: TrainConfig,
    cnn_cfg: CnnConfig,
    vocabulary: LabelVocabulary,
    norm_stats: ChannelStats | None = None,
) -> TrainResult:
    """Epochs of per-epoch-shuffled mini-batches; returns the best-validation model.

    Inputs must already be normalized with the training-set statistics
    (pass those stats here so the model carries them).
    """
    if not train_set:
        raise EmptyTrainingSet("no training patches")
    if not val_set:
        raise EmptyTrainingSet("no validation patches")

    rng = np.random.default_rng(cfg.seed)
    model = init_model(cnn_cfg, vocabulary, norm_stats, rng=rng)
    velocity = init_velocity(model)
    x_train, y_train = _to_arrays(train_set, vocabulary, model.dtype)
    x_val, y_val = _to_arrays(val_set, vocabulary, model.dtype)
    eye = np.eye(cnn_cfg.num_classes, dtype=model.dtype)

    best_acc, best_params, best_epoch = -1.0, model.copy_params(), 0
    history: list[dict] = []
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(x_train))
        total_loss = 0.0
        for lo in range(0, len(order), cfg.batch_size):
            idx = order[lo:lo + cfg.batch_size]
            loss, grads = backward(model, x_train[idx], eye[y_train[idx]],
                                   l2=cfg.l2, rng=rng)
            sgd_step(model, grads, velocity, cfg)
            total_loss += loss * len(idx)
        train_loss = total_loss / len(x_train)
        val_acc = _accuracy(model, x_val, y_val)
        history.append({"epoch": epoch, "train_loss": train_loss, "val_acc": val_acc})
        log.info("epoch %d train_loss %.4f val_acc %.4f", epoch, train_loss, val_acc)
        if val_acc > best_acc:
            best_acc, best_params, best_epoch = val_acc, model.copy_params(), epoch
        elif epoch - best_epoch > cfg.early_stop_patience:
            log.info("early stop at epoch %d (best %d)", epoch, best_epoch)
            break

    model.params = best_params
    return TrainResult(model=model, log=history)


def predict_segments(model: CnnModel, patches: list[FeaturePatch],
                     batch_size: int = 128) -> list[Prediction]:
    """One posterior per patch, in input order; argmax ties go to the lowest index."""
    labels = model.vocabulary.labels
    out: list[Prediction] = []
    for lo in range(0, len(patches), batch_size):
        chunk = patches[lo:lo + batch_size]
        batch = np.stack([p.values for p in chunk])
        if tuple(batch.shape[1:]) != tuple(model.config.input_shape):
            raise ShapeMismatch(f"patch shape {batch.shape[1:]}")
        probs = forward(model, batch, mode="infer")
        for patch, row in zip(chunk, probs):
            k = int(row.argmax())
            out.append(Prediction(
                segment_id=patch.segment_id,
                probabilities=row.astype(np.float64),
                predicted_class=labels[k],
                confidence=float(row[k]),
            ))
    return out
