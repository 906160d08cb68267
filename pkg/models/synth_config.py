from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from constants import ENCODER_STRIDE
from exceptions import ConfigurationError
from models.config_base import ConfigMixin
from models.enums import ShapeKind


@dataclass(frozen=True)
class SynthConfig(ConfigMixin):
    H: int = 64
    W: int = 64
    T: int = 8
    n_distractors: int = 1
    occlusion_interval: Optional[Tuple[int, int]] = None
    motion_speed: float = 2.0
    shape_kind: ShapeKind = ShapeKind.SQUARE
    seed: int = 0
    object_size: int = 12

    def __post_init__(self) -> None:
        self._coerce_enum("shape_kind", ShapeKind)
        self._coerce_tuple("occlusion_interval")
        for name in ("H", "W"):
            value = getattr(self, name)
            if value < ENCODER_STRIDE or value % ENCODER_STRIDE:
                raise ConfigurationError(name, f"must be a positive multiple of {ENCODER_STRIDE}, got {value}")
        if self.T < 2:
            raise ConfigurationError("T", f"must be at least 2, got {self.T}")
        if self.n_distractors < 0:
            raise ConfigurationError("n_distractors", "must be non-negative")
        if self.motion_speed < 0:
            raise ConfigurationError("motion_speed", "must be non-negative")
        if not 3 <= self.object_size <= min(self.H, self.W) // 2:
            raise ConfigurationError("object_size", f"must lie in [3, {min(self.H, self.W) // 2}]")
        if self.occlusion_interval is not None:
            if len(self.occlusion_interval) != 2:
                raise ConfigurationError("occlusion_interval", "must be a (start, end) pair")
            start, end = self.occlusion_interval
            if not 1 <= start < end < self.T:
                raise ConfigurationError(
                    "occlusion_interval", f"need 1 <= start < end < T={self.T}, got ({start}, {end})"
                )

    def occluded(self, t: int) -> bool:
        if self.occlusion_interval is None:
            return False
        start, end = self.occlusion_interval
        return start <= t <= end


@dataclass(frozen=True)
class DatasetConfig(ConfigMixin):
    """Per-sequence variation drawn by generate_dataset on top of a base SynthConfig."""

    n_sequences: int = 4
    length_range: Optional[Tuple[int, int]] = None
    occlusion_prob: float = 0.0
    occlusion_length_range: Tuple[int, int] = (4, 8)
    distractor_range: Optional[Tuple[int, int]] = None
    vary_shape: bool = False

    def __post_init__(self) -> None:
        for name in ("length_range", "occlusion_length_range", "distractor_range"):
            self._coerce_tuple(name)
        if self.n_sequences < 0:
            raise ConfigurationError("n_sequences", "must be non-negative")
        if not 0.0 <= self.occlusion_prob <= 1.0:
            raise ConfigurationError("occlusion_prob", "must lie in [0, 1]")
        for name in ("length_range", "occlusion_length_range", "distractor_range"):
            value = getattr(self, name)
            if value is not None and (len(value) != 2 or value[0] > value[1] or value[0] < 0):
                raise ConfigurationError(name, f"must be an ordered (low, high) pair, got {value}")
        if self.length_range is not None and self.length_range[0] < 2:
            raise ConfigurationError("length_range", "sequences need at least 2 frames")
        if self.occlusion_length_range[0] < 2:
            raise ConfigurationError("occlusion_length_range", "occlusions last at least two frames")


@dataclass(frozen=True)
class AugConfig(ConfigMixin):
    hflip_prob: float = 0.5
    max_rotation: float = 10.0
    max_translation: float = 0.1
    max_scale_delta: float = 0.1

    def __post_init__(self) -> None:
        if not 0.0 <= self.hflip_prob <= 1.0:
            raise ConfigurationError("hflip_prob", "must lie in [0, 1]")
        if self.max_rotation < 0:
            raise ConfigurationError("max_rotation", "must be non-negative")
        for name in ("max_translation", "max_scale_delta"):
            if not 0.0 <= getattr(self, name) <= 0.5:
                raise ConfigurationError(name, "must lie in [0, 0.5]")

    @classmethod
    def identity(cls) -> "AugConfig":
        return cls(hflip_prob=0.0, max_rotation=0.0, max_translation=0.0, max_scale_delta=0.0)
