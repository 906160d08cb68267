from __future__ import annotations

import math
from typing import NamedTuple, Optional, Union

import torch

from exceptions import NonFiniteLossError, ShapeMismatchError
from losses.border import border_loss
from losses.segmentation import balanced_bce
from models.loss_config import BorderTargets, LossConfig

Scalar = Union[float, torch.Tensor]


def _is_finite(value: Scalar) -> bool:
    if isinstance(value, torch.Tensor):
        return bool(torch.isfinite(value).all())
    return math.isfinite(value)


def total_loss(l_seg: Scalar, l_aux: Scalar, config: LossConfig, seq_id: Optional[str] = None) -> Scalar:
    """lambda * l_seg + (1 - lambda) * l_aux; non-finite inputs raise."""
    for name, value in (("segmentation", l_seg), ("border", l_aux)):
        if not _is_finite(value):
            raise NonFiniteLossError(f"{name} loss is not finite: {float(value)}", seq_id=seq_id)
    lam = config.lambda_seg
    return lam * l_seg + (1.0 - lam) * l_aux


class SnippetLoss(NamedTuple):
    total: torch.Tensor
    seg: torch.Tensor
    aux: torch.Tensor


def snippet_loss(
    fg_probs: torch.Tensor,
    aux_logits: torch.Tensor,
    gt_masks: torch.Tensor,
    targets: BorderTargets,
    config: LossConfig,
    seq_id: Optional[str] = None,
) -> SnippetLoss:
    """
    Loss over the predicted frames 1..T-1 of one snippet.

    The balanced BCE sums over all frames at once; the border term sums the
    per-frame pixel-mean cross-entropies.
    """
    if fg_probs.shape != gt_masks.shape:
        raise ShapeMismatchError(f"predictions {tuple(fg_probs.shape)} and targets {tuple(gt_masks.shape)} disagree")
    if targets.num_classes != aux_logits.shape[1]:
        raise ShapeMismatchError(f"{targets.num_classes} border classes but {aux_logits.shape[1]} logit channels")
    seg = balanced_bce(fg_probs, gt_masks, config.eps, config.beta_scope)
    classes = torch.as_tensor(targets.classes, dtype=torch.long)
    aux = sum(
        border_loss(aux_logits[t : t + 1], classes[t : t + 1]) for t in range(aux_logits.shape[0])
    )
    return SnippetLoss(total=total_loss(seg, aux, config, seq_id=seq_id), seg=seg, aux=aux)
