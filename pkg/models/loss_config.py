from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

import constants
from exceptions import ConfigurationError, ShapeMismatchError
from models.config_base import ConfigMixin
from models.enums import BetaScope


@dataclass(frozen=True)
class LossConfig(ConfigMixin):
    lambda_seg: float = constants.LAMBDA_SEG
    eps: float = constants.PROB_EPS
    border_bin_edges: Tuple[int, ...] = constants.BORDER_BIN_EDGES
    beta_scope: BetaScope = BetaScope.BATCH

    def __post_init__(self) -> None:
        self._coerce_enum("beta_scope", BetaScope)
        self._coerce_tuple("border_bin_edges")
        if not 0.0 <= self.lambda_seg <= 1.0:
            raise ConfigurationError("lambda_seg", "must lie in [0, 1]")
        if not 0.0 < self.eps < 0.5:
            raise ConfigurationError("eps", "must lie in (0, 0.5)")
        edges = self.border_bin_edges
        if not edges or edges[0] <= 0 or any(b <= a for a, b in zip(edges, edges[1:])):
            raise ConfigurationError("border_bin_edges", f"must be strictly increasing and positive, got {edges}")

    @property
    def aux_classes(self) -> int:
        return len(self.border_bin_edges) + 1


@dataclass
class BorderTargets:
    """Per-pixel border class map, int64 [B, H, W] with values in [0, K)."""

    classes: np.ndarray
    num_classes: int

    def __post_init__(self) -> None:
        if self.classes.ndim != 3:
            raise ShapeMismatchError(f"border targets must be [B, H, W], got {self.classes.shape}")
