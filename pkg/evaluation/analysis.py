from __future__ import annotations

from collections import Counter
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np

from constants import EARLY_CUT, LATE_CUT, LENGTH_MIN_LEN, OCCLUSION_THRESHOLDS
from models.scores import LengthSplit, OcclusionEvent, OcclusionSplit, SequenceReport
from models.sequence import MaskSequence

Areas = Union[MaskSequence, Sequence[int], np.ndarray]


def _mean(values: List[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def _areas(masks: Areas) -> np.ndarray:
    if isinstance(masks, MaskSequence):
        return masks.areas()
    return np.asarray(masks, dtype=np.int64)


def length_analysis(
    reports: Iterable[SequenceReport],
    early_cut: int = EARLY_CUT,
    late_cut: int = LATE_CUT,
    min_len: int = LENGTH_MIN_LEN,
) -> LengthSplit:
    """Early (t < early_cut) and late (t > late_cut) frame means over sequences longer than min_len."""
    long_reports = [r for r in reports if r.length > min_len]
    if not long_reports:
        return LengthSplit()
    early = [s for r in long_reports for s in r.scores if s.t < early_cut]
    late = [s for r in long_reports for s in r.scores if s.t > late_cut]
    return LengthSplit(
        F_early=_mean([s.F for s in early]),
        J_early=_mean([s.J for s in early]),
        F_late=_mean([s.F for s in late]),
        J_late=_mean([s.J for s in late]),
        n_sequences=len(long_reports),
    )


def find_occlusions(masks: Areas, threshold: int = 0) -> List[OcclusionEvent]:
    """
    Maximal runs of frames with area <= threshold that the object re-appears after.

    Runs must start after frame 0; if frame 0 itself is at or below the
    threshold, the run it opens is skipped. A trailing run with no
    re-appearance is not an event.
    """
    areas = _areas(masks)
    n = len(areas)
    events: List[OcclusionEvent] = []
    t = 1
    if n and areas[0] <= threshold:
        while t < n and areas[t] <= threshold:
            t += 1
    while t < n:
        if areas[t] > threshold:
            t += 1
            continue
        start = t
        while t < n and areas[t] <= threshold:
            t += 1
        if t < n:
            events.append(OcclusionEvent(start=start, end=t - 1, threshold=threshold))
    return events


def occlusion_analysis(
    reports: Iterable[SequenceReport],
    gt_areas: Mapping[str, Areas],
    thresholds: Sequence[int] = OCCLUSION_THRESHOLDS,
) -> OcclusionSplit:
    """
    Mean (J + F) / 2 over the frames after the end of each sequence's first occlusion.

    Frames are pooled across the sequences with at least one event; `avg` pools
    every scored frame of every sequence.
    """
    reports = list(reports)
    avg = _mean([s.JF for r in reports for s in r.scores])
    by_threshold: Dict[int, Optional[float]] = {}
    counts: Dict[int, int] = {}
    for th in thresholds:
        values: List[float] = []
        n = 0
        for report in reports:
            events = find_occlusions(gt_areas[report.seq_id], th)
            if not events:
                continue
            n += 1
            end = events[0].end
            values.extend(s.JF for s in report.scores if s.t > end)
        by_threshold[int(th)] = _mean(values)
        counts[int(th)] = n
    return OcclusionSplit(avg=avg, by_threshold=by_threshold, n_sequences=counts)


def length_histogram(dataset: Iterable) -> Dict[int, int]:
    """Counts of per-object sequence lengths; accepts (video, masks) pairs or plain lengths."""
    lengths = [int(item) if isinstance(item, (int, np.integer)) else item[0].T for item in dataset]
    return dict(sorted(Counter(lengths).items()))


def occlusion_duration_histogram(
    gt_areas: Union[Mapping[str, Areas], Iterable[Areas]],
    thresholds: Sequence[int] = OCCLUSION_THRESHOLDS,
) -> Dict[int, Dict[int, int]]:
    sequences = list(gt_areas.values()) if isinstance(gt_areas, Mapping) else list(gt_areas)
    histogram: Dict[int, Dict[int, int]] = {}
    for th in thresholds:
        durations = Counter(e.duration for areas in sequences for e in find_occlusions(areas, th))
        histogram[int(th)] = dict(sorted(durations.items()))
    return histogram
