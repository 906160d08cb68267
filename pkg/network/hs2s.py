"""
Hybrid sequence-to-sequence segmentation network.

Per frame t >= 1:

    x0     = reference_encoder(frame_0, mask_0)
    x_prev = reference_encoder(frame_{t-1}, mask_{t-1})
    x_t, P = encoder(frame_t, mask_{t-1})
    h, c   = rnn(x_t, (h, c))
    m      = merge(h, x0, x_prev)
    y_t    = decoder(m, P)

The S2S baseline variant initialises (h, c) from the reference encoding of
frame 0 and decodes h directly.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import torch
import torch.nn.functional as F
from torch import nn

from constants import ENCODER_STAGES
from exceptions import MissingReferenceError, ShapeMismatchError
from loggers.network_logger import network_logger as logger
from models.enums import Variant
from models.model_config import ModelConfig
from network.backbone import FeaturePyramid, MaskEncoder
from network.layers import ConvLSTMCell, GlobalConv, RNNState


@dataclass
class SegOutput:
    fg_prob: torch.Tensor  # [B, 1, H, W]
    aux_logits: torch.Tensor  # [B, K, H, W]


@dataclass
class SequenceOutput:
    fg_probs: torch.Tensor  # [T - 1, 1, H, W]
    aux_logits: torch.Tensor  # [T - 1, K, H, W]

    def __len__(self) -> int:
        return int(self.fg_probs.shape[0])


def cosine_map(h: torch.Tensor, ref: torch.Tensor) -> torch.Tensor:
    """Best cosine match of each h position against all reference positions, [B, 1, h, w]."""
    hn = F.normalize(h, dim=1).flatten(2)
    rn = F.normalize(ref, dim=1).flatten(2)
    sim = torch.einsum("bcp,bcq->bpq", hn, rn)
    return sim.max(dim=2).values.view(h.shape[0], 1, *h.shape[2:])


class MergeLayer(nn.Module):
    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        d, k = config.bottleneck_channels, config.gc_kernel
        self.variant = config.variant
        if self.variant is Variant.HS2S_FULL:
            self.gc_ref0 = GlobalConv(2 * d, d, k)
            self.gc_prev = GlobalConv(2 * d, d, k)
            self.fuse = nn.Conv2d(2 * d, d, 1)
        elif self.variant is Variant.HS2S_REF0_ONLY:
            self.gc_ref0 = GlobalConv(2 * d, d, k)
            self.fuse = nn.Conv2d(d, d, 1)
        elif self.variant is Variant.HS2S_PREV_ONLY:
            self.gc_prev = GlobalConv(2 * d, d, k)
            self.fuse = nn.Conv2d(d, d, 1)
        elif self.variant is Variant.HS2S_COSINE:
            self.fuse = nn.Conv2d(d + 2, d, 1)

    def forward(
        self, h: torch.Tensor, x_ref0: Optional[torch.Tensor] = None, x_prev: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        if self.variant is Variant.S2S_BASELINE:
            return h
        if self.variant.uses_first_frame and x_ref0 is None:
            raise MissingReferenceError(f"{self.variant.value} needs the frame-0 reference feature")
        if self.variant.uses_previous_frame and x_prev is None:
            raise MissingReferenceError(f"{self.variant.value} needs the previous-frame reference feature")
        for ref in (x_ref0, x_prev):
            if ref is not None and ref.shape != h.shape:
                raise ShapeMismatchError(f"reference {tuple(ref.shape)} does not match h {tuple(h.shape)}")

        if self.variant is Variant.HS2S_COSINE:
            return self.fuse(torch.cat([h, cosine_map(h, x_ref0), cosine_map(h, x_prev)], dim=1))
        branches = []
        if self.variant.uses_first_frame:
            branches.append(self.gc_ref0(torch.cat([h, x_ref0], dim=1)))
        if self.variant.uses_previous_frame:
            branches.append(self.gc_prev(torch.cat([h, x_prev], dim=1)))
        return self.fuse(torch.cat(branches, dim=1))


class Initializer(nn.Module):
    """Two 1x1 heads mapping the frame-0 reference encoding to (h0, c0)."""

    def __init__(self, channels: int) -> None:
        super().__init__()
        self.init_h = nn.Conv2d(channels, channels, 1)
        self.init_c = nn.Conv2d(channels, channels, 1)

    def forward(self, x_ref0: torch.Tensor) -> RNNState:
        return RNNState(h=F.relu(self.init_h(x_ref0)), c=self.init_c(x_ref0))


class Decoder(nn.Module):
    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        enc = config.encoder_channels
        dec = config.decoder_channels
        in_widths = [config.bottleneck_channels, *dec[:-1]]
        # stage s consumes pyramid level 4 - s
        self.skip_projections = nn.ModuleList(
            nn.Conv2d(enc[ENCODER_STAGES - 1 - s], in_widths[s], 1) for s in range(ENCODER_STAGES)
        )
        self.stages = nn.ModuleList(nn.Conv2d(in_widths[s], dec[s], 5, padding=2) for s in range(ENCODER_STAGES))
        self.skip_rnn = (
            ConvLSTMCell(enc[0], enc[0], config.skip_rnn_kernel, config.state_activation)
            if config.use_skip_rnn
            else None
        )
        self.seg_head = nn.Conv2d(dec[-1], 1, 1)
        self.aux_head = nn.Conv2d(dec[-1], config.aux_classes, 1)

    def forward(
        self, merged: torch.Tensor, pyramid: FeaturePyramid, skip_state: Optional[RNNState] = None
    ) -> Tuple[SegOutput, Optional[RNNState]]:
        if len(pyramid) != ENCODER_STAGES:
            raise ShapeMismatchError(f"decoder needs {ENCODER_STAGES} pyramid levels, got {len(pyramid)}")
        x = merged
        for s, (project, conv) in enumerate(zip(self.skip_projections, self.stages)):
            skip = pyramid[ENCODER_STAGES - 1 - s]
            if s == ENCODER_STAGES - 1 and self.skip_rnn is not None:
                skip_state = self.skip_rnn(skip, skip_state)
                skip = skip + skip_state.h
            if skip.shape[2:] != x.shape[2:]:
                raise ShapeMismatchError(f"skip {tuple(skip.shape)} does not align with {tuple(x.shape)} at stage {s}")
            x = x + project(skip)
            x = F.relu(conv(F.interpolate(x, scale_factor=2, mode="nearest")))
        return SegOutput(fg_prob=torch.sigmoid(self.seg_head(x)), aux_logits=self.aux_head(x)), skip_state


class HS2SNet(nn.Module):
    def __init__(self, config: ModelConfig) -> None:
        super().__init__()
        self.config = config
        d = config.bottleneck_channels
        self.encoder = MaskEncoder(config.encoder_channels, d)
        self.reference_encoder = MaskEncoder(config.encoder_channels, d)
        self.rnn = ConvLSTMCell(d, d, config.rnn_kernel, config.state_activation)
        self.merger = MergeLayer(config)
        self.initializer = Initializer(d) if config.variant is Variant.S2S_BASELINE else None
        self.decoder = Decoder(config)
        logger.debug(
            f"built {config.variant.value} with {sum(p.numel() for p in self.parameters())} parameters"
        )

    @property
    def variant(self) -> Variant:
        return self.config.variant

    def encode(self, frame: torch.Tensor, prev_mask: torch.Tensor) -> Tuple[torch.Tensor, FeaturePyramid]:
        return self.encoder(frame, prev_mask)

    def encode_reference(self, frame: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        return self.reference_encoder(frame, mask)[0]

    def merge(
        self, h: torch.Tensor, x_ref0: Optional[torch.Tensor] = None, x_prev: Optional[torch.Tensor] = None
    ) -> torch.Tensor:
        return self.merger(h, x_ref0, x_prev)

    def decode(
        self, merged: torch.Tensor, pyramid: FeaturePyramid, skip_state: Optional[RNNState] = None
    ) -> Tuple[SegOutput, Optional[RNNState]]:
        return self.decoder(merged, pyramid, skip_state)

    def forward_sequence(
        self,
        frames: torch.Tensor,
        first_mask: torch.Tensor,
        mask_feed: Optional[Sequence[bool]] = None,
        gt_masks: Optional[torch.Tensor] = None,
    ) -> SequenceOutput:
        """
        Segment frames 1..T-1 of one sequence given the frame-0 mask.

        Args:
            frames: [T, 3, H, W]
            first_mask: [1, H, W]
            mask_feed: length-T flags, True at index i feeds gt_masks[i] instead of the
                prediction for frame i; index 0 is ignored (first_mask is always used).
                Default is all-predicted.
            gt_masks: [T, 1, H, W], required iff any flag from index 1 is True.
        """
        T = frames.shape[0]
        if frames.ndim != 4 or T < 2:
            raise ShapeMismatchError(f"forward_sequence needs frames [T>=2, 3, H, W], got {tuple(frames.shape)}")
        if first_mask.shape != (1, *frames.shape[2:]):
            raise ShapeMismatchError(f"first_mask {tuple(first_mask.shape)} does not pair with frames")
        feed = [False] * T if mask_feed is None else [bool(f) for f in mask_feed]
        if len(feed) != T:
            raise ShapeMismatchError(f"mask_feed has {len(feed)} entries for {T} frames")
        if any(feed[1:]) and gt_masks is None:
            raise MissingReferenceError("mask_feed selects ground truth but no gt_masks were given")

        frame0 = frames[0:1]
        mask = first_mask.unsqueeze(0).to(frames.dtype)
        x_ref0 = self.encode_reference(frame0, mask)
        if self.variant is Variant.S2S_BASELINE:
            state = self.initializer(x_ref0)
        else:
            state = self.rnn.initial_state(x_ref0)
        skip_state: Optional[RNNState] = None

        fg_probs: List[torch.Tensor] = []
        aux_logits: List[torch.Tensor] = []
        for t in range(1, T):
            if t > 1:
                mask = gt_masks[t - 1 : t].to(frames.dtype) if feed[t - 1] else fg_probs[-1]
            x_prev = None
            if self.variant.uses_previous_frame:
                x_prev = x_ref0 if t == 1 else self.encode_reference(frames[t - 1 : t], mask)
            x_t, pyramid = self.encode(frames[t : t + 1], mask)
            state = self.rnn(x_t, state)
            merged = self.merge(state.h, x_ref0, x_prev)
            out, skip_state = self.decode(merged, pyramid, skip_state)
            fg_probs.append(out.fg_prob)
            aux_logits.append(out.aux_logits)

        return SequenceOutput(fg_probs=torch.cat(fg_probs, dim=0), aux_logits=torch.cat(aux_logits, dim=0))
