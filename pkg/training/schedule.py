from __future__ import annotations

from typing import List

import numpy as np

from models.train_config import ScheduleState, TrainConfig


def p_gt_at(step: int, config: TrainConfig) -> float:
    """Linear decay of the ground-truth feed probability, floored at p_min."""
    return max(config.p_min, 1.0 - step / config.decay_steps)


def initial_schedule(config: TrainConfig) -> ScheduleState:
    return ScheduleState(step=0, p_gt=p_gt_at(0, config))


def advance(state: ScheduleState, config: TrainConfig) -> ScheduleState:
    return ScheduleState(step=state.step + 1, p_gt=p_gt_at(state.step + 1, config))


def teacher_forcing_policy(state: ScheduleState, config: TrainConfig, seed: int, length: int) -> List[bool]:
    """
    Per-frame feed flags for a snippet of `length` frames.

    True feeds the ground-truth mask of that frame to the next step. Frame 0 is
    always True since the given first mask is used regardless.
    """
    p = p_gt_at(state.step, config)
    draws = np.random.default_rng(seed).random(length)
    flags = [bool(x < p) for x in draws]
    if length:
        flags[0] = True
    return flags
