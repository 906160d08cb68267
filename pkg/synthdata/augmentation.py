from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import ndimage

from constants import MASK_THRESHOLD
from exceptions import ShapeMismatchError
from models.synth_config import AugConfig


@dataclass(frozen=True)
class SpatialTransform:
    """One geometric transform shared by every frame of a snippet."""

    hflip: bool = False
    angle_deg: float = 0.0
    translate: Tuple[float, float] = (0.0, 0.0)  # (dy, dx) in pixels
    scale: float = 1.0

    @property
    def is_affine_identity(self) -> bool:
        return self.angle_deg == 0.0 and self.translate == (0.0, 0.0) and self.scale == 1.0


def sample_transform(aug: AugConfig, H: int, W: int, rng: np.random.Generator) -> SpatialTransform:
    hflip = bool(rng.random() < aug.hflip_prob)
    angle = float(rng.uniform(-aug.max_rotation, aug.max_rotation)) if aug.max_rotation > 0 else 0.0
    if aug.max_translation > 0:
        dy, dx = rng.uniform(-aug.max_translation, aug.max_translation, size=2) * np.array([H, W])
        translate = (float(dy), float(dx))
    else:
        translate = (0.0, 0.0)
    scale = 1.0 + float(rng.uniform(-aug.max_scale_delta, aug.max_scale_delta)) if aug.max_scale_delta > 0 else 1.0
    return SpatialTransform(hflip=hflip, angle_deg=angle, translate=translate, scale=scale)


def _inverse_affine(transform: SpatialTransform, H: int, W: int) -> Tuple[np.ndarray, np.ndarray]:
    # scipy maps output coordinates to input coordinates: in = matrix @ out + offset
    theta = np.deg2rad(transform.angle_deg)
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    matrix = rotation.T / transform.scale
    center = np.array([(H - 1) / 2.0, (W - 1) / 2.0])
    offset = center - matrix @ (center + np.asarray(transform.translate))
    return matrix, offset


def apply_transform(
    frames: np.ndarray, masks: np.ndarray, transform: SpatialTransform
) -> Tuple[np.ndarray, np.ndarray]:
    frames = np.asarray(frames, dtype=np.float32)
    masks = np.asarray(masks, dtype=np.float32)
    if frames.shape[0] != masks.shape[0] or frames.shape[2:] != masks.shape[2:]:
        raise ShapeMismatchError(f"frames {frames.shape} and masks {masks.shape} are not paired")

    if transform.hflip:
        frames = frames[..., ::-1]
        masks = masks[..., ::-1]
    if transform.is_affine_identity:
        return np.ascontiguousarray(frames), np.ascontiguousarray(masks)

    H, W = frames.shape[2:]
    matrix, offset = _inverse_affine(transform, H, W)

    def warp(plane: np.ndarray) -> np.ndarray:
        return ndimage.affine_transform(plane, matrix, offset=offset, order=1, mode="constant", cval=0.0)

    out_frames = np.empty_like(frames)
    out_masks = np.empty_like(masks)
    for t in range(frames.shape[0]):
        for c in range(frames.shape[1]):
            out_frames[t, c] = warp(frames[t, c])
        out_masks[t, 0] = warp(masks[t, 0]) >= MASK_THRESHOLD
    return np.clip(out_frames, 0.0, 1.0), out_masks


def augment(
    frames: np.ndarray, masks: np.ndarray, aug: AugConfig, seed: int
) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    H, W = np.shape(frames)[2:]
    return apply_transform(frames, masks, sample_transform(aug, H, W, rng))
