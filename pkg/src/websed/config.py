"""Declarative pipeline configuration with layered overrides.

Resolution order, weakest to strongest: built-in defaults, then the YAML
config file, then ``WEBSED_``-prefixed environment variables, then command
line flags. The resolved tree is hashed and the hash is stamped into every
artifact so outputs can be traced back to the exact settings.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .cnn import CnnConfig, ConvSpec, TrainConfig
from .errors import BadConfig, InvalidConfig
from .features import FeatureConfig

ENV_PREFIX = "WEBSED_"

# Sections whose keys are validated by their dataclass constructors instead
# of against DEFAULTS (they default to empty and accept field overrides).
FREE_SECTIONS = frozenset({"features", "cnn", "train"})

DEFAULTS: dict[str, Any] = {
    "dataset": "synth",
    "seed": 0,
    "threads": 0,  # 0 = use all available cores
    "manifest": "data/manifest.csv",
    "corpus_root": "data",
    "model_dir": "models",
    "out_dir": "out",
    "features": {},      # FeatureConfig field overrides
    "cnn": {},           # CnnConfig field overrides (num_classes comes from data)
    "train": {},         # TrainConfig field overrides
    "evaluation": {
        "k_grid": [1, 5, 10, 20, 40],
        "k_per_class": 40,
        "min_votes": 3,
        "evaluators": ["eval_1", "eval_2", "eval_3", "eval_4", "eval_5"],
    },
    "serve": {
        "host": "127.0.0.1",
        "port": 8000,
    },
}


def _deep_update(base: dict, overlay: Mapping, path: str = "",
                 free: bool = False) -> dict:
    for key, value in overlay.items():
        where = f"{path}{key}"
        if not free and key not in base:
            raise BadConfig(f"unknown config key {where!r}")
        into_free = free or (not path and key in FREE_SECTIONS)
        current = base.get(key)
        if isinstance(current, dict) or (current is None and isinstance(value, Mapping)):
            if not isinstance(value, Mapping):
                raise BadConfig(f"{where!r} must be a mapping")
            base.setdefault(key, {})
            _deep_update(base[key], value, where + ".", into_free)
        else:
            base[key] = value
    return base


def _env_overrides(environ: Mapping[str, str]) -> dict:
    """WEBSED_SEED=7 sets seed; WEBSED_TRAIN__EPOCHS=5 sets train.epochs."""
    tree: dict[str, Any] = {}
    for name, raw in environ.items():
        if not name.startswith(ENV_PREFIX):
            continue
        parts = name[len(ENV_PREFIX):].lower().split("__")
        node = tree
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        try:
            node[parts[-1]] = yaml.safe_load(raw)
        except yaml.YAMLError:
            node[parts[-1]] = raw
    return tree


@dataclass
class PipelineConfig:
    """Resolved settings tree plus typed views into its sections."""
    values: dict[str, Any] = field(default_factory=dict)

    def __getitem__(self, key: str) -> Any:
        return self.values[key]

    @property
    def seed(self) -> int:
        return int(self.values["seed"])

    @property
    def dataset(self) -> str:
        return str(self.values["dataset"])

    def path(self, key: str) -> Path:
        return Path(self.values[key])

    def feature_config(self) -> FeatureConfig:
        try:
            return FeatureConfig(**self.values["features"])
        except (TypeError, InvalidConfig) as exc:
            raise BadConfig(f"features: {exc}") from exc

    def cnn_config(self, num_classes: int) -> CnnConfig:
        """Build the architecture, honoring flat filter-count overrides."""
        overrides = dict(self.values["cnn"])
        overrides.pop("num_classes", None)
        kwargs: dict[str, Any] = {}
        if "conv1_filters" in overrides:
            kwargs["conv1"] = ConvSpec(filters=int(overrides.pop("conv1_filters")),
                                       kernel=(57, 6))
        if "conv2_filters" in overrides:
            kwargs["conv2"] = ConvSpec(filters=int(overrides.pop("conv2_filters")),
                                       kernel=(1, 3))
        kwargs.update(overrides)
        try:
            return CnnConfig(num_classes=num_classes, **kwargs)
        except (TypeError, InvalidConfig) as exc:
            raise BadConfig(f"cnn: {exc}") from exc

    def train_config(self) -> TrainConfig:
        overrides = dict(self.values["train"])
        overrides.setdefault("seed", self.seed)
        try:
            return TrainConfig(**overrides)
        except (TypeError, InvalidConfig) as exc:
            raise BadConfig(f"train: {exc}") from exc

    @property
    def k_grid(self) -> tuple[int, ...]:
        grid = tuple(int(k) for k in self.values["evaluation"]["k_grid"])
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise BadConfig("evaluation.k_grid must be strictly increasing")
        return grid

    @property
    def evaluators(self) -> list[str]:
        return [str(e) for e in self.values["evaluation"]["evaluators"]]

    @property
    def min_votes(self) -> int:
        return int(self.values["evaluation"]["min_votes"])

    @property
    def k_per_class(self) -> int:
        return int(self.values["evaluation"]["k_per_class"])

    def hash(self) -> str:
        blob = json.dumps(self.values, sort_keys=True, default=str)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]


def load_config(config_file: str | Path | None = None,
                flag_overrides: Mapping[str, Any] | None = None,
                environ: Mapping[str, str] | None = None) -> PipelineConfig:
    values = json.loads(json.dumps(DEFAULTS))  # deep copy of plain data
    if config_file is not None:
        path = Path(config_file)
        if not path.is_file():
            raise BadConfig(f"config file not found: {path}")
        try:
            loaded = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as exc:
            raise BadConfig(f"{path}: {exc}") from exc
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, Mapping):
            raise BadConfig(f"{path}: top level must be a mapping")
        _deep_update(values, loaded)
    env = _env_overrides(os.environ if environ is None else environ)
    if env:
        _deep_update(values, env)
    if flag_overrides:
        _deep_update(values, {k: v for k, v in flag_overrides.items()
                              if v is not None})
    return PipelineConfig(values=values)
