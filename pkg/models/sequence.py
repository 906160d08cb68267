from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from constants import ENCODER_STRIDE
from exceptions import FrameSizeError, ShapeMismatchError
from tools.mask_geometry import mask_areas


@dataclass
class VideoSequence:
    """Ordered RGB frames of one object track, float32 [T, 3, H, W] in [0, 1]."""

    frames: np.ndarray
    seq_id: str

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames, dtype=np.float32)
        if self.frames.ndim != 4 or self.frames.shape[1] != 3:
            raise ShapeMismatchError(f"{self.seq_id}: frames must be [T, 3, H, W], got {self.frames.shape}")
        if self.T < 2:
            raise ShapeMismatchError(f"{self.seq_id}: a sequence needs at least 2 frames, got {self.T}")
        if self.H % ENCODER_STRIDE or self.W % ENCODER_STRIDE:
            raise FrameSizeError(
                f"{self.seq_id}: frame size {self.H}x{self.W} is not a multiple of {ENCODER_STRIDE}"
            )
        if self.frames.min() < 0.0 or self.frames.max() > 1.0:
            raise ShapeMismatchError(f"{self.seq_id}: frame values must lie in [0, 1]")

    @property
    def T(self) -> int:
        return int(self.frames.shape[0])

    @property
    def H(self) -> int:
        return int(self.frames.shape[2])

    @property
    def W(self) -> int:
        return int(self.frames.shape[3])


@dataclass
class MaskSequence:
    """Binary object masks aligned with a VideoSequence, float32 [T, 1, H, W] in {0, 1}."""

    masks: np.ndarray
    object_id: str

    def __post_init__(self) -> None:
        self.masks = np.asarray(self.masks, dtype=np.float32)
        if self.masks.ndim != 4 or self.masks.shape[1] != 1:
            raise ShapeMismatchError(f"{self.object_id}: masks must be [T, 1, H, W], got {self.masks.shape}")
        if not np.isin(self.masks, (0.0, 1.0)).all():
            raise ShapeMismatchError(f"{self.object_id}: masks must be binary")

    @property
    def T(self) -> int:
        return int(self.masks.shape[0])

    def areas(self) -> np.ndarray:
        return mask_areas(self.masks)


SequencePair = Tuple[VideoSequence, MaskSequence]


def check_pair(video: VideoSequence, masks: MaskSequence) -> None:
    if video.T != masks.T or video.frames.shape[2:] != masks.masks.shape[2:]:
        raise ShapeMismatchError(
            f"{video.seq_id}: frames {video.frames.shape} and masks {masks.masks.shape} disagree"
        )


@dataclass(frozen=True)
class ManifestEntry:
    id: str
    length: int


@dataclass
class Manifest:
    sequences: List[ManifestEntry] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"sequences": [{"id": e.id, "length": e.length} for e in self.sequences]}

    @classmethod
    def from_dict(cls, data: dict) -> "Manifest":
        return cls([ManifestEntry(id=e["id"], length=int(e["length"])) for e in data["sequences"]])
