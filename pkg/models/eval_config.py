from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import constants
from exceptions import ConfigurationError
from models.config_base import ConfigMixin


@dataclass(frozen=True)
class EvalConfig(ConfigMixin):
    mask_threshold: float = constants.MASK_THRESHOLD
    tol_fraction: float = constants.BOUNDARY_TOL_FRACTION
    early_cut: int = constants.EARLY_CUT
    late_cut: int = constants.LATE_CUT
    min_len: int = constants.LENGTH_MIN_LEN
    occlusion_thresholds: Tuple[int, ...] = constants.OCCLUSION_THRESHOLDS

    def __post_init__(self) -> None:
        self._coerce_tuple("occlusion_thresholds")
        if not 0.0 < self.mask_threshold < 1.0:
            raise ConfigurationError("mask_threshold", "must lie in (0, 1)")
        if not 0.0 <= self.tol_fraction < 1.0:
            raise ConfigurationError("tol_fraction", "must lie in [0, 1)")
        if self.early_cut < 1 or self.late_cut < self.early_cut:
            raise ConfigurationError("late_cut", "need 1 <= early_cut <= late_cut")
        if self.min_len < 0:
            raise ConfigurationError("min_len", "must be non-negative")
        if any(t < 0 for t in self.occlusion_thresholds):
            raise ConfigurationError("occlusion_thresholds", "thresholds are pixel counts >= 0")
