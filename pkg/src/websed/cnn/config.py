"""Architecture and training hyperparameter containers."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from ..errors import InvalidConfig


@dataclass(frozen=True)
class ConvSpec:
    filters: int
    kernel: tuple[int, int]
    stride: tuple[int, int] = (1, 1)


@dataclass(frozen=True)
class PoolSpec:
    shape: tuple[int, int]
    stride: tuple[int, int]


@dataclass(frozen=True)
class CnnConfig:
    """Two conv+pool stages, two FC hidden layers, softmax output.

    Defaults give the 60x101x2 -> 80x4x96 -> 80x1x32 -> 80x1x30 -> 80x1x10
    -> 800 stage shapes; fc_width and num_classes vary per use.
    """

    num_classes: int
    input_shape: tuple[int, int, int] = (60, 101, 2)
    conv1: ConvSpec = ConvSpec(filters=80, kernel=(57, 6))
    pool1: PoolSpec = PoolSpec(shape=(4, 3), stride=(1, 3))
    conv2: ConvSpec = ConvSpec(filters=80, kernel=(1, 3))
    pool2: PoolSpec = PoolSpec(shape=(1, 3), stride=(1, 3))
    fc_width: int = 5000
    dropout_p: float = 0.5

    def __post_init__(self):
        if self.num_classes < 2:
            raise InvalidConfig("num_classes must be >= 2")
        if not 0.0 <= self.dropout_p < 1.0:
            raise InvalidConfig("dropout_p must be in [0, 1)")
        if self.fc_width < 1:
            raise InvalidConfig("fc_width must be >= 1")
        self.stage_shapes()  # raises InvalidConfig on a non-positive stage

    def stage_shapes(self) -> dict[str, tuple[int, ...]]:
        """Per-stage output shapes as (H, W, C); flatten stage is an int."""

        def conv_out(hw, spec: ConvSpec):
            h = (hw[0] - spec.kernel[0]) // spec.stride[0] + 1
            w = (hw[1] - spec.kernel[1]) // spec.stride[1] + 1
            return h, w

        def pool_out(hw, spec: PoolSpec):
            h = (hw[0] - spec.shape[0]) // spec.stride[0] + 1
            w = (hw[1] - spec.shape[1]) // spec.stride[1] + 1
            return h, w

        h, w, c = self.input_shape
        shapes: dict[str, tuple[int, ...]] = {"input": (h, w, c)}
        hw = conv_out((h, w), self.conv1)
        shapes["conv1"] = (*hw, self.conv1.filters)
        hw = pool_out(hw, self.pool1)
        shapes["pool1"] = (*hw, self.conv1.filters)
        hw = conv_out(hw, self.conv2)
        shapes["conv2"] = (*hw, self.conv2.filters)
        hw = pool_out(hw, self.pool2)
        shapes["pool2"] = (*hw, self.conv2.filters)
        for name, shape in shapes.items():
            if name != "input" and any(s < 1 for s in shape):
                raise InvalidConfig(f"stage {name} collapses to {shape}")
        shapes["flatten"] = (hw[0] * hw[1] * self.conv2.filters,)
        return shapes

    @property
    def flat_dim(self) -> int:
        return self.stage_shapes()["flatten"][0]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "CnnConfig":
        return cls(
            num_classes=d["num_classes"],
            input_shape=tuple(d["input_shape"]),
            conv1=ConvSpec(d["conv1"]["filters"], tuple(d["conv1"]["kernel"]),
                           tuple(d["conv1"]["stride"])),
            pool1=PoolSpec(tuple(d["pool1"]["shape"]), tuple(d["pool1"]["stride"])),
            conv2=ConvSpec(d["conv2"]["filters"], tuple(d["conv2"]["kernel"]),
                           tuple(d["conv2"]["stride"])),
            pool2=PoolSpec(tuple(d["pool2"]["shape"]), tuple(d["pool2"]["stride"])),
            fc_width=d["fc_width"],
            dropout_p=d["dropout_p"],
        )


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 1000
    learning_rate: float = 0.002
    momentum: float = 0.9
    l2: float = 0.001
    epochs: int = 30
    early_stop_patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise InvalidConfig("batch_size must be >= 1")
        if not 0.0 <= self.momentum < 1.0:
            raise InvalidConfig("momentum must be in [0, 1)")
        if self.l2 < 0:
            raise InvalidConfig("l2 must be >= 0")
        if self.learning_rate <= 0:
            raise InvalidConfig("learning_rate must be positive")
        if self.epochs < 1:
            raise InvalidConfig("epochs must be >= 1")
