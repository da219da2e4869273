"""Versioned binary model files.

Layout: magic "WSED" | version u32 LE | header length u32 LE | header JSON
(config, vocabulary, normalization stats, parameter shapes) | one raw
little-endian float32 block per parameter, in PARAM_ORDER.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from ..datasets import DatasetId, LabelVocabulary
from ..errors import CorruptFile, IncompatibleVersion, MissingFile
from ..features import ChannelStats
from .config import CnnConfig
from .network import CnnModel, PARAM_ORDER

MAGIC = b"WSED"
FORMAT_VERSION = 1


def save_model(model: CnnModel, path: str | Path) -> None:
    header = {
        "config": model.config.to_dict(),
        "vocabulary": {
            "dataset_id": model.vocabulary.dataset_id.value,
            "labels": list(model.vocabulary.labels),
        },
        "norm_stats": model.norm_stats.to_dict() if model.norm_stats else None,
        "param_shapes": {k: list(model.params[k].shape) for k in PARAM_ORDER},
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", FORMAT_VERSION, len(blob)))
        fh.write(blob)
        for name in PARAM_ORDER:
            fh.write(np.ascontiguousarray(model.params[name], dtype="<f4").tobytes())


def load_model(path: str | Path) -> CnnModel:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    raw = path.read_bytes()
    if len(raw) < 12 or raw[:4] != MAGIC:
        raise CorruptFile(f"{path}: not a model file")
    version, blob_len = struct.unpack("<II", raw[4:12])
    if version != FORMAT_VERSION:
        raise IncompatibleVersion(version, FORMAT_VERSION)
    if len(raw) < 12 + blob_len:
        raise CorruptFile(f"{path}: truncated header")
    try:
        header = json.loads(raw[12:12 + blob_len].decode("utf-8"))
        config = CnnConfig.from_dict(header["config"])
        vocabulary = LabelVocabulary(
            DatasetId(header["vocabulary"]["dataset_id"]),
            tuple(header["vocabulary"]["labels"]),
        )
        stats = header.get("norm_stats")
        norm_stats = ChannelStats.from_dict(stats) if stats else None
        shapes = {k: tuple(v) for k, v in header["param_shapes"].items()}
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise CorruptFile(f"{path}: bad header ({exc})") from exc

    params: dict[str, np.ndarray] = {}
    cursor = 12 + blob_len
    for name in PARAM_ORDER:
        if name not in shapes:
            raise CorruptFile(f"{path}: header missing shape for {name}")
        count = int(np.prod(shapes[name]))
        end = cursor + 4 * count
        if end > len(raw):
            raise CorruptFile(f"{path}: truncated parameter block {name}")
        params[name] = np.frombuffer(raw[cursor:end], dtype="<f4").reshape(shapes[name]).copy()
        cursor = end
    if cursor != len(raw):
        raise CorruptFile(f"{path}: {len(raw) - cursor} trailing bytes")
    return CnnModel(config=config, vocabulary=vocabulary,
                    norm_stats=norm_stats, params=params)
