from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from exceptions import ConfigurationError
from models.config_base import ConfigMixin
from models.enums import Variant
from models.model_config import ModelConfig


@dataclass(frozen=True)
class TrainConfig(ConfigMixin):
    lr: float = 1e-4
    lr_decay_factor: float = 0.5
    lr_patience: int = 200
    loss_smoothing: float = 0.9
    batch_size: int = 4
    max_steps: int = 1000
    snippet_min: int = 5
    snippet_max: int = 10
    p_min: float = 0.0
    decay_steps: int = 1000
    seed: int = 0
    grad_clip_norm: float = 5.0
    checkpoint_every: int = 500
    log_every: int = 10

    def __post_init__(self) -> None:
        if self.lr < 0:
            raise ConfigurationError("lr", "must be non-negative")
        if not 0.0 < self.lr_decay_factor < 1.0:
            raise ConfigurationError("lr_decay_factor", "must lie in (0, 1)")
        if not 0.0 <= self.loss_smoothing < 1.0:
            raise ConfigurationError("loss_smoothing", "must lie in [0, 1)")
        if not 0.0 <= self.p_min <= 1.0:
            raise ConfigurationError("p_min", "must lie in [0, 1]")
        if self.snippet_min < 2 or self.snippet_min > self.snippet_max:
            raise ConfigurationError("snippet_min", "need 2 <= snippet_min <= snippet_max")
        for name in ("batch_size", "decay_steps", "checkpoint_every", "log_every"):
            if getattr(self, name) < 1:
                raise ConfigurationError(name, "must be positive")
        for name in ("max_steps", "lr_patience"):
            if getattr(self, name) < 0:
                raise ConfigurationError(name, "must be non-negative")

    @property
    def clipping_enabled(self) -> bool:
        return self.grad_clip_norm > 0


@dataclass(frozen=True)
class ScheduleState:
    step: int = 0
    p_gt: float = 1.0

    def to_dict(self) -> Dict[str, Any]:
        return {"step": self.step, "p_gt": self.p_gt}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScheduleState":
        return cls(step=int(data["step"]), p_gt=float(data["p_gt"]))


@dataclass(frozen=True)
class StepMetrics:
    step: int
    loss_total: float
    loss_seg: float
    loss_aux: float
    p_gt: float
    lr: float
    grad_norm: float = 0.0

    def log_row(self) -> Dict[str, Any]:
        return {
            "step": self.step,
            "loss_total": repr(self.loss_total),
            "loss_seg": repr(self.loss_seg),
            "loss_aux": repr(self.loss_aux),
            "p_gt": repr(self.p_gt),
            "lr": repr(self.lr),
        }


@dataclass(frozen=True)
class AblationConfig(ConfigMixin):
    variants: Tuple[Variant, ...] = tuple(Variant)
    seeds: Tuple[int, ...] = (0,)

    def __post_init__(self) -> None:
        try:
            self._set("variants", tuple(Variant(v) for v in self.variants))
        except ValueError as e:
            raise ConfigurationError("variants", str(e)) from None
        self._coerce_tuple("seeds")
        if not self.variants:
            raise ConfigurationError("variants", "needs at least one variant")
        if not self.seeds:
            raise ConfigurationError("seeds", "needs at least one seed")


@dataclass
class Checkpoint:
    model_config: ModelConfig
    model_state: Dict[str, Any]
    optimizer_state: Optional[Dict[str, Any]] = None
    lr_scheduler_state: Optional[Dict[str, Any]] = None
    schedule: ScheduleState = field(default_factory=ScheduleState)
    step: int = 0
    metrics: Dict[str, float] = field(default_factory=dict)
