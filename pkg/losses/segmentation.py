from __future__ import annotations

import torch

from constants import PROB_EPS
from exceptions import InvalidTargetError, ShapeMismatchError
from models.enums import BetaScope


def _weighted_terms(p: torch.Tensor, gt: torch.Tensor) -> torch.Tensor:
    pos = gt * torch.log(p)
    neg = (1.0 - gt) * torch.log1p(-p)
    beta = 1.0 - gt.mean()
    w_pos, w_neg = beta, 1.0 - beta
    # a single-class target keeps its own term at full weight
    if not gt.any():
        w_neg = torch.ones_like(beta)
    elif gt.all():
        w_pos = torch.ones_like(beta)
    return -(w_pos * pos.sum() + w_neg * neg.sum())


def balanced_bce(
    fg_prob: torch.Tensor,
    gt: torch.Tensor,
    eps: float = PROB_EPS,
    beta_scope: BetaScope = BetaScope.BATCH,
) -> torch.Tensor:
    """
    Class-balanced binary cross-entropy, summed over pixels.

        L = -beta * sum_{fg} log p - (1 - beta) * sum_{bg} log(1 - p),  beta = |bg| / |all|

    With BetaScope.BATCH one beta covers every pixel of the batch; with
    BetaScope.FRAME each [1, H, W] frame gets its own beta and the frame losses
    are summed. An all-background target (beta = 1) would zero the background
    weight, so it falls back to the plain background term -sum log(1 - p);
    an all-foreground target likewise keeps -sum log p.
    """
    if fg_prob.shape != gt.shape:
        raise ShapeMismatchError(f"prediction {tuple(fg_prob.shape)} and target {tuple(gt.shape)} disagree")
    gt = gt.to(fg_prob.dtype)
    if not torch.all((gt == 0) | (gt == 1)):
        raise InvalidTargetError("segmentation targets must be binary")

    p = fg_prob.clamp(eps, 1.0 - eps)
    if BetaScope(beta_scope) is BetaScope.FRAME:
        total = p.new_zeros(())
        for p_frame, gt_frame in zip(p, gt):
            total = total + _weighted_terms(p_frame, gt_frame)
        return total
    return _weighted_terms(p, gt)
