"""
Region similarity (J) and boundary accuracy (F) per frame.

F matches boundary pixels within a radius of ceil(tol_fraction * image
diagonal) using a Euclidean distance transform rather than bipartite
matching.
"""
from __future__ import annotations

import math
from typing import List

import numpy as np
from scipy import ndimage

from constants import BOUNDARY_TOL_FRACTION, MASK_THRESHOLD
from exceptions import ShapeMismatchError
from models.scores import FrameScore
from tools.mask_geometry import as_binary, boundary_pixels


def _check_pair(pred: np.ndarray, gt: np.ndarray) -> None:
    if pred.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} and ground truth {gt.shape} disagree")


def jaccard(pred: np.ndarray, gt: np.ndarray) -> float:
    pred, gt = as_binary(pred), as_binary(gt)
    _check_pair(pred, gt)
    union = np.logical_or(pred, gt).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(pred, gt).sum() / union)


def tolerance_radius(shape, tol_fraction: float = BOUNDARY_TOL_FRACTION) -> int:
    H, W = shape[-2:]
    return int(math.ceil(tol_fraction * math.hypot(H, W)))


def boundary_f(pred: np.ndarray, gt: np.ndarray, tol_fraction: float = BOUNDARY_TOL_FRACTION) -> float:
    pred, gt = as_binary(pred), as_binary(gt)
    _check_pair(pred, gt)
    pred_b, gt_b = boundary_pixels(pred), boundary_pixels(gt)
    if not pred_b.any() and not gt_b.any():
        return 1.0
    if not pred_b.any() or not gt_b.any():
        return 0.0

    r = tolerance_radius(pred.shape, tol_fraction)
    dist_to_gt = ndimage.distance_transform_edt(~gt_b)
    dist_to_pred = ndimage.distance_transform_edt(~pred_b)
    precision = float(np.mean(dist_to_gt[pred_b] <= r))
    recall = float(np.mean(dist_to_pred[gt_b] <= r))
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def evaluate_sequence(
    pred_masks: np.ndarray,
    gt_masks: np.ndarray,
    threshold: float = MASK_THRESHOLD,
    tol_fraction: float = BOUNDARY_TOL_FRACTION,
) -> List[FrameScore]:
    """
    Score predictions for frames 1..T-1 against the matching ground truth.

    Both inputs are [T-1, 1, H, W] or [T-1, H, W]; soft predictions are
    thresholded here.
    """
    pred = np.asarray(pred_masks)
    gt = np.asarray(gt_masks)
    if len(pred) != len(gt):
        raise ShapeMismatchError(f"{len(pred)} predicted frames for {len(gt)} ground-truth frames")
    if pred.ndim == 4:
        pred = pred[:, 0]
    if gt.ndim == 4:
        gt = gt[:, 0]
    pred = as_binary(pred, threshold)
    gt = as_binary(gt)
    return [
        FrameScore(t=i + 1, J=jaccard(p, g), F=boundary_f(p, g, tol_fraction))
        for i, (p, g) in enumerate(zip(pred, gt))
    ]
