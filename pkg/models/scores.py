from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional


@dataclass(frozen=True)
class FrameScore:
    t: int
    J: float
    F: float

    @property
    def JF(self) -> float:
        return (self.J + self.F) / 2.0


@dataclass(frozen=True)
class OcclusionEvent:
    start: int
    end: int
    threshold: int

    @property
    def duration(self) -> int:
        return self.end - self.start + 1


@dataclass
class SequenceReport:
    seq_id: str
    length: int
    scores: List[FrameScore] = field(default_factory=list)

    @property
    def mean_J(self) -> float:
        return sum(s.J for s in self.scores) / len(self.scores) if self.scores else 0.0

    @property
    def mean_F(self) -> float:
        return sum(s.F for s in self.scores) / len(self.scores) if self.scores else 0.0


@dataclass(frozen=True)
class LengthSplit:
    """Early/late frame means; all None is the empty-split marker."""

    F_early: Optional[float] = None
    J_early: Optional[float] = None
    F_late: Optional[float] = None
    J_late: Optional[float] = None
    n_sequences: int = 0

    @property
    def is_empty(self) -> bool:
        return self.n_sequences == 0


@dataclass(frozen=True)
class OcclusionSplit:
    avg: Optional[float]
    by_threshold: Dict[int, Optional[float]] = field(default_factory=dict)
    n_sequences: Dict[int, int] = field(default_factory=dict)


@dataclass
class MetricsReport:
    per_sequence: Dict[str, List[FrameScore]]
    mean_J: float
    mean_F: float
    mean_JF: float
    length_split: LengthSplit
    occlusion_split: OcclusionSplit
    length_histogram: Dict[int, int]
    occlusion_durations: Dict[int, Dict[int, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "per_sequence": {k: [asdict(s) for s in v] for k, v in self.per_sequence.items()},
            "mean_J": self.mean_J,
            "mean_F": self.mean_F,
            "mean_JF": self.mean_JF,
            "length_split": None if self.length_split.is_empty else asdict(self.length_split),
            "occlusion_split": {
                "avg": self.occlusion_split.avg,
                "by_threshold": {str(k): v for k, v in self.occlusion_split.by_threshold.items()},
                "n_sequences": {str(k): v for k, v in self.occlusion_split.n_sequences.items()},
            },
            "length_histogram": {str(k): v for k, v in self.length_histogram.items()},
            "occlusion_durations": {
                str(th): {str(d): c for d, c in hist.items()} for th, hist in self.occlusion_durations.items()
            },
        }
