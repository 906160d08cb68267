"""
Auxiliary border classification.

Every pixel, on either side of the object contour, is binned by its
4-connected distance to the contour; the network predicts the bin.
"""
from __future__ import annotations

from typing import Sequence, Union

import numpy as np
import torch
import torch.nn.functional as F
from scipy import ndimage

from constants import BORDER_BIN_EDGES, DISTANCE_SENTINEL
from exceptions import InvalidTargetError, ShapeMismatchError
from models.loss_config import BorderTargets
from tools.mask_geometry import boundary_pixels


def distance_transform(mask: np.ndarray) -> np.ndarray:
    """Taxicab distance of each pixel to the nearest boundary pixel; all-background gives the sentinel everywhere."""
    boundary = boundary_pixels(mask)
    if not boundary.any():
        return np.full(boundary.shape, DISTANCE_SENTINEL, dtype=np.int64)
    return ndimage.distance_transform_cdt(~boundary, metric="taxicab").astype(np.int64)


def border_classes(distances: np.ndarray, edges: Sequence[int] = BORDER_BIN_EDGES) -> np.ndarray:
    # class = number of edges strictly below the distance; the sentinel lands in the last class
    return np.searchsorted(np.asarray(edges), distances, side="left").astype(np.int64)


def border_targets(mask: np.ndarray, edges: Sequence[int] = BORDER_BIN_EDGES) -> BorderTargets:
    """
    Accepts a single [H, W] mask or a stack shaped [B, H, W] / [B, 1, H, W].
    """
    mask = np.asarray(mask)
    if mask.ndim == 4:
        if mask.shape[1] != 1:
            raise ShapeMismatchError(f"expected [B, 1, H, W] masks, got {mask.shape}")
        mask = mask[:, 0]
    elif mask.ndim == 2:
        mask = mask[None]
    elif mask.ndim != 3:
        raise ShapeMismatchError(f"expected a [H, W] mask or a mask stack, got {mask.shape}")
    classes = np.stack([border_classes(distance_transform(m), edges) for m in mask])
    return BorderTargets(classes=classes, num_classes=len(edges) + 1)


def border_loss(aux_logits: torch.Tensor, targets: Union[BorderTargets, torch.Tensor]) -> torch.Tensor:
    """Pixel-mean cross-entropy over the K border classes."""
    if isinstance(targets, BorderTargets):
        num_classes = targets.num_classes
        classes = torch.as_tensor(targets.classes, dtype=torch.long, device=aux_logits.device)
    else:
        num_classes = aux_logits.shape[1]
        classes = targets.long()
    if aux_logits.ndim != 4 or aux_logits.shape[1] != num_classes:
        raise ShapeMismatchError(f"logits {tuple(aux_logits.shape)} do not carry {num_classes} classes")
    if classes.shape != (aux_logits.shape[0], *aux_logits.shape[2:]):
        raise ShapeMismatchError(f"targets {tuple(classes.shape)} do not match logits {tuple(aux_logits.shape)}")
    if classes.numel() and (classes.min() < 0 or classes.max() >= num_classes):
        raise InvalidTargetError(f"border class indices must lie in [0, {num_classes})")
    return F.cross_entropy(aux_logits, classes)
