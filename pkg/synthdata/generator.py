"""
Parametric moving-shapes videos.

Each sequence has one labelled target and optional distractors that share the
target's shape and colour family. Distractors are painted first so the target
is never split by another shape, and the target is simply not drawn while it is
occluded.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from loggers.synthdata_logger import synthdata_logger as logger
from models.enums import ShapeKind
from models.sequence import MaskSequence, SequencePair, VideoSequence
from models.synth_config import DatasetConfig, SynthConfig
from utils import derive_seed


@dataclass
class _Mover:
    y: float
    x: float
    vy: float
    vx: float
    size: float
    color: np.ndarray

    def step(self, H: int, W: int) -> None:
        half = self.size / 2.0
        lo_y, hi_y = half + 1.0, H - 2.0 - half
        lo_x, hi_x = half + 1.0, W - 2.0 - half
        self.y += self.vy
        self.x += self.vx
        if self.y < lo_y or self.y > hi_y:
            self.vy = -self.vy
            self.y = float(np.clip(self.y, lo_y, hi_y))
        if self.x < lo_x or self.x > hi_x:
            self.vx = -self.vx
            self.x = float(np.clip(self.x, lo_x, hi_x))


def rasterize(kind: ShapeKind, cy: float, cx: float, size: float, H: int, W: int) -> np.ndarray:
    yy, xx = np.mgrid[0:H, 0:W].astype(np.float64)
    half = size / 2.0
    dy, dx = yy - cy, xx - cx
    if kind is ShapeKind.SQUARE:
        return (np.abs(dy) <= half) & (np.abs(dx) <= half)
    if kind is ShapeKind.CIRCLE:
        return dy ** 2 + dx ** 2 <= half ** 2
    # apex up, width grows linearly to the base
    rel = (dy + half) / (2.0 * half)
    return (rel >= 0.0) & (rel <= 1.0) & (np.abs(dx) <= half * rel + 0.5)


def _spawn(rng: np.random.Generator, config: SynthConfig, size: float, color: np.ndarray) -> _Mover:
    half = size / 2.0
    y = rng.uniform(half + 1.0, config.H - 2.0 - half)
    x = rng.uniform(half + 1.0, config.W - 2.0 - half)
    angle = rng.uniform(0.0, 2.0 * np.pi)
    return _Mover(
        y=y,
        x=x,
        vy=config.motion_speed * np.sin(angle),
        vx=config.motion_speed * np.cos(angle),
        size=size,
        color=color,
    )


def generate_sequence(config: SynthConfig, seq_id: Optional[str] = None) -> SequencePair:
    rng = np.random.default_rng(config.seed)
    H, W, T = config.H, config.W, config.T
    seq_id = seq_id or f"synth-{config.seed}"

    background = np.clip(
        rng.uniform(0.05, 0.35, size=(3, 1, 1)) + rng.normal(0.0, 0.02, size=(3, H, W)), 0.0, 1.0
    )
    target_color = rng.uniform(0.55, 0.95, size=3)
    target = _spawn(rng, config, float(config.object_size), target_color)
    distractors = [
        _spawn(
            rng,
            config,
            float(config.object_size) * rng.uniform(0.8, 1.2),
            np.clip(target_color + rng.uniform(-0.08, 0.08, size=3), 0.0, 1.0),
        )
        for _ in range(config.n_distractors)
    ]

    frames = np.empty((T, 3, H, W), dtype=np.float32)
    masks = np.zeros((T, 1, H, W), dtype=np.float32)
    for t in range(T):
        frame = background.copy()
        for d in distractors:
            region = rasterize(config.shape_kind, d.y, d.x, d.size, H, W)
            frame[:, region] = d.color[:, None]
        if not config.occluded(t):
            region = rasterize(config.shape_kind, target.y, target.x, target.size, H, W)
            frame[:, region] = target.color[:, None]
            masks[t, 0] = region
        frames[t] = frame
        for mover in (target, *distractors):
            mover.step(H, W)

    logger.debug(f"generated {seq_id}: T={T} distractors={config.n_distractors} occlusion={config.occlusion_interval}")
    return VideoSequence(frames=frames, seq_id=seq_id), MaskSequence(masks=masks, object_id=seq_id)


def _draw_occlusion(rng: np.random.Generator, T: int, dataset: DatasetConfig) -> Optional[Tuple[int, int]]:
    # start >= 1 and end <= T - 2 so the target is seen before and after
    if T < 4 or rng.random() >= dataset.occlusion_prob:
        return None
    low, high = dataset.occlusion_length_range
    length = int(rng.integers(low, high + 1))
    length = min(length, T - 2)
    start = int(rng.integers(1, T - length))
    return start, start + length - 1


def generate_dataset(base: SynthConfig, dataset: DatasetConfig, seed: int) -> List[SequencePair]:
    rng = np.random.default_rng(seed)
    kinds = list(ShapeKind)
    pairs: List[SequencePair] = []
    for i in range(dataset.n_sequences):
        T = int(rng.integers(dataset.length_range[0], dataset.length_range[1] + 1)) if dataset.length_range else base.T
        n_distractors = (
            int(rng.integers(dataset.distractor_range[0], dataset.distractor_range[1] + 1))
            if dataset.distractor_range
            else base.n_distractors
        )
        kind = kinds[int(rng.integers(len(kinds)))] if dataset.vary_shape else base.shape_kind
        if dataset.occlusion_prob > 0:
            occlusion = _draw_occlusion(rng, T, dataset)
        elif base.occlusion_interval is not None and base.occlusion_interval[1] < T:
            occlusion = base.occlusion_interval
        else:
            occlusion = None
        config = replace(
            base,
            T=T,
            n_distractors=n_distractors,
            shape_kind=kind,
            occlusion_interval=occlusion,
            seed=derive_seed(seed, i),
        )
        pairs.append(generate_sequence(config, seq_id=f"seq{i:04d}"))
    logger.info(f"generated {len(pairs)} sequences (seed={seed})")
    return pairs
