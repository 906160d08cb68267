from __future__ import annotations

from pathlib import Path
from typing import List, Sequence, Union

import numpy as np
from PIL import Image, ImageDraw

from constants import GROUND_TRUTH_COLOR, MASK_THRESHOLD, OVERLAY_ALPHA, PREDICTION_COLOR
from exceptions import ShapeMismatchError
from loggers.evaluation_logger import evaluation_logger as logger

TEXT_COLOR = (255, 255, 255)


def to_uint8_image(frame: np.ndarray) -> np.ndarray:
    """[3, H, W] float in [0, 1] -> [H, W, 3] uint8."""
    return np.rint(np.clip(frame, 0.0, 1.0) * 255.0).astype(np.uint8).transpose(1, 2, 0)


def blend(image: np.ndarray, mask: np.ndarray, color: Sequence[int], alpha: float = OVERLAY_ALPHA) -> np.ndarray:
    """Alpha-blend `color` into the uint8 [H, W, 3] image wherever mask is set; other pixels are untouched."""
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != image.shape[:2]:
        raise ShapeMismatchError(f"mask {mask.shape} does not cover image {image.shape}")
    out = image.copy()
    mixed = (1.0 - alpha) * image[mask].astype(np.float64) + alpha * np.asarray(color, dtype=np.float64)
    out[mask] = np.rint(mixed).astype(np.uint8)
    return out


def annotate(image: np.ndarray, text: str) -> Image.Image:
    img = Image.fromarray(image)
    ImageDraw.Draw(img).text((2, 2), text, fill=TEXT_COLOR)
    return img


def render_overlays(
    frames: np.ndarray,
    first_mask: np.ndarray,
    predictions: np.ndarray,
    out_dir: Union[str, Path],
    seq_id: str = "",
) -> List[Path]:
    """
    One PNG per frame: frame 0 carries the given mask in green, frames 1..T-1 the
    thresholded prediction in red.
    """
    frames = np.asarray(frames)
    predictions = np.asarray(predictions)
    if len(predictions) != len(frames) - 1:
        raise ShapeMismatchError(f"{len(predictions)} predictions for {len(frames)} frames")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    paths: List[Path] = []
    for t, frame in enumerate(frames):
        image = to_uint8_image(frame)
        if t == 0:
            image = blend(image, np.asarray(first_mask).reshape(image.shape[:2]) >= MASK_THRESHOLD, GROUND_TRUTH_COLOR)
            label = f"{seq_id} t={t} given"
        else:
            image = blend(image, predictions[t - 1].reshape(image.shape[:2]) >= MASK_THRESHOLD, PREDICTION_COLOR)
            label = f"{seq_id} t={t}"
        path = Path(out_dir, f"{t:05d}.png")
        try:
            annotate(image, label.strip()).save(path)
        except OSError as e:
            raise OSError(f"Could not write overlay {path}: {e}") from e
        paths.append(path)
    logger.info(f"wrote {len(paths)} overlays to {out_dir}")
    return paths
