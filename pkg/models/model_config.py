from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Tuple

from constants import ENCODER_STAGES, ENCODER_STRIDE
from exceptions import ConfigurationError
from models.config_base import ConfigMixin
from models.enums import StateActivation, Variant


@dataclass(frozen=True)
class ModelConfig(ConfigMixin):
    in_H: int = 64
    in_W: int = 64
    base_channels: int = 8
    bottleneck_channels: int = 32
    rnn_kernel: int = 3
    gc_kernel: int = 7
    decoder_channels: Tuple[int, ...] = (64, 32, 16, 8, 8)
    aux_classes: int = 4
    variant: Variant = Variant.HS2S_FULL
    use_skip_rnn: bool = True
    skip_rnn_kernel: int = 3
    state_activation: StateActivation = StateActivation.RELU_BOTH

    def __post_init__(self) -> None:
        self._coerce_enum("variant", Variant)
        self._coerce_enum("state_activation", StateActivation)
        self._coerce_tuple("decoder_channels")
        for name in ("in_H", "in_W"):
            value = getattr(self, name)
            if value < ENCODER_STRIDE or value % ENCODER_STRIDE:
                raise ConfigurationError(name, f"must be a positive multiple of {ENCODER_STRIDE}")
        if len(self.decoder_channels) != ENCODER_STAGES:
            raise ConfigurationError("decoder_channels", f"needs exactly {ENCODER_STAGES} entries")
        if any(c < 1 for c in self.decoder_channels):
            raise ConfigurationError("decoder_channels", "widths must be positive")
        for name in ("base_channels", "bottleneck_channels"):
            if getattr(self, name) < 1:
                raise ConfigurationError(name, "must be positive")
        for name in ("gc_kernel", "rnn_kernel", "skip_rnn_kernel"):
            value = getattr(self, name)
            if value < 1 or value % 2 == 0:
                raise ConfigurationError(name, f"must be a positive odd kernel size, got {value}")
        if self.aux_classes < 2:
            raise ConfigurationError("aux_classes", "needs at least 2 border classes")

    @property
    def encoder_channels(self) -> Tuple[int, ...]:
        return tuple(self.base_channels * 2 ** i for i in range(ENCODER_STAGES))

    def with_variant(self, variant: Variant) -> "ModelConfig":
        return replace(self, variant=Variant(variant))
