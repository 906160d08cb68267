from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from exceptions import SnippetError
from models.sequence import MaskSequence, SequencePair, VideoSequence


def sample_snippet(pair: SequencePair, min_len: int = 5, max_len: int = 10, seed: int = 0) -> SequencePair:
    """
    Contiguous window of uniform length in [min_len, max_len] whose first frame shows the object.

    The start is drawn uniformly among the admissible starts with a nonzero
    first-frame mask. Frame 0 always qualifies, so a start always exists.
    """
    video, masks = pair
    T = video.T
    if min_len > max_len:
        raise SnippetError(f"min_len {min_len} exceeds max_len {max_len}")
    if T < min_len:
        raise SnippetError(f"{video.seq_id}: {T} frames is shorter than min_len={min_len}")

    rng = np.random.default_rng(seed)
    length = int(rng.integers(min_len, min(max_len, T) + 1))
    areas = masks.areas()
    starts = [s for s in range(T - length + 1) if areas[s] > 0]
    if not starts:
        # only reachable for inputs whose frame 0 is empty
        starts = [int(np.flatnonzero(areas)[0])] if areas.any() else [0]
        length = min(length, T - starts[0])
    start = starts[int(rng.integers(len(starts)))]

    window = slice(start, start + length)
    seq_id = f"{video.seq_id}[{start}:{start + length}]"
    return (
        VideoSequence(frames=video.frames[window], seq_id=seq_id),
        MaskSequence(masks=masks.masks[window], object_id=seq_id),
    )


def split_dataset(
    pairs: Sequence[SequencePair], train_fraction: float = 0.8, seed: int = 0
) -> Tuple[List[SequencePair], List[SequencePair]]:
    if not 0.0 <= train_fraction <= 1.0:
        raise ValueError(f"train_fraction must lie in [0, 1], got {train_fraction}")
    order = np.random.default_rng(seed).permutation(len(pairs))
    n_train = int(round(train_fraction * len(pairs)))
    train = [pairs[i] for i in sorted(order[:n_train])]
    val = [pairs[i] for i in sorted(order[n_train:])]
    return train, val
