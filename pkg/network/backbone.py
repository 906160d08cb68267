from __future__ import annotations

from typing import List, Sequence, Tuple

import torch
import torch.nn.functional as F
from torch import nn

from constants import ENCODER_STAGES
from exceptions import ShapeMismatchError


class FeaturePyramid:
    """Per-stage encoder features at strides 2, 4, 8, 16, 32."""

    def __init__(self, levels: Sequence[torch.Tensor]) -> None:
        levels = list(levels)
        if len(levels) != ENCODER_STAGES:
            raise ShapeMismatchError(f"a feature pyramid has {ENCODER_STAGES} levels, got {len(levels)}")
        sizes = [lvl.shape[-1] for lvl in levels]
        if any(b >= a for a, b in zip(sizes, sizes[1:])):
            raise ShapeMismatchError(f"pyramid levels must shrink strictly, got widths {sizes}")
        self.levels: List[torch.Tensor] = levels

    def __len__(self) -> int:
        return len(self.levels)

    def __getitem__(self, i: int) -> torch.Tensor:
        return self.levels[i]

    @property
    def spatial_sizes(self) -> List[Tuple[int, int]]:
        return [tuple(lvl.shape[-2:]) for lvl in self.levels]


class ResidualStage(nn.Module):
    """Two 3x3 convs, the first with stride 2, plus a strided 1x1 shortcut."""

    def __init__(self, in_channels: int, out_channels: int) -> None:
        super().__init__()
        self.conv1 = nn.Conv2d(in_channels, out_channels, 3, stride=2, padding=1)
        self.conv2 = nn.Conv2d(out_channels, out_channels, 3, padding=1)
        self.shortcut = nn.Conv2d(in_channels, out_channels, 1, stride=2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        y = self.conv2(F.relu(self.conv1(x)))
        return F.relu(y + self.shortcut(x))


class Backbone(nn.Module):
    def __init__(self, in_channels: int, stage_channels: Sequence[int]) -> None:
        super().__init__()
        widths = [in_channels, *stage_channels]
        self.stages = nn.ModuleList(ResidualStage(a, b) for a, b in zip(widths, widths[1:]))

    def forward(self, x: torch.Tensor) -> List[torch.Tensor]:
        features = []
        for stage in self.stages:
            x = stage(x)
            features.append(x)
        return features


class MaskEncoder(nn.Module):
    """RGB + mask (4 channels) -> residual backbone -> 1x1 projection to the bottleneck width."""

    def __init__(self, stage_channels: Sequence[int], out_channels: int) -> None:
        super().__init__()
        self.backbone = Backbone(4, stage_channels)
        self.projection = nn.Conv2d(stage_channels[-1], out_channels, 1)

    def forward(self, frame: torch.Tensor, mask: torch.Tensor) -> Tuple[torch.Tensor, FeaturePyramid]:
        if frame.ndim != 4 or frame.shape[1] != 3:
            raise ShapeMismatchError(f"frame must be [B, 3, H, W], got {tuple(frame.shape)}")
        if mask.ndim != 4 or mask.shape[1] != 1 or mask.shape[0] != frame.shape[0] or mask.shape[2:] != frame.shape[2:]:
            raise ShapeMismatchError(f"mask {tuple(mask.shape)} does not pair with frame {tuple(frame.shape)}")
        features = self.backbone(torch.cat([frame, mask.to(frame.dtype)], dim=1))
        return self.projection(features[-1]), FeaturePyramid(features)
