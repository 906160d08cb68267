from __future__ import annotations

from typing import Dict, Mapping, Optional, Sequence

import numpy as np
import torch
from joblib import Parallel, delayed

from configuration import Configuration as Config
from evaluation.analysis import length_analysis, length_histogram, occlusion_analysis, occlusion_duration_histogram
from evaluation.metrics import evaluate_sequence
from loggers.evaluation_logger import evaluation_logger as logger
from models.eval_config import EvalConfig
from models.scores import MetricsReport, SequenceReport
from models.sequence import SequencePair, VideoSequence
from network.hs2s import HS2SNet


@torch.no_grad()
def predict_sequence(net: HS2SNet, video: VideoSequence, first_mask: np.ndarray) -> np.ndarray:
    """All-predicted inference; returns soft masks for frames 1..T-1, [T-1, 1, H, W]."""
    net.eval()
    dtype = next(net.parameters()).dtype
    frames = torch.from_numpy(np.ascontiguousarray(video.frames)).to(dtype)
    mask0 = torch.from_numpy(np.ascontiguousarray(first_mask)).to(dtype).reshape(1, video.H, video.W)
    out = net.forward_sequence(frames, mask0)
    return out.fg_probs.cpu().numpy()


def build_report(
    predictions: Mapping[str, np.ndarray],
    dataset: Sequence[SequencePair],
    eval_config: Optional[EvalConfig] = None,
    n_jobs: Optional[int] = None,
) -> MetricsReport:
    eval_config = eval_config or EvalConfig()
    scored = Parallel(n_jobs=n_jobs or Config.num_workers)(
        delayed(evaluate_sequence)(
            predictions[video.seq_id], masks.masks[1:], eval_config.mask_threshold, eval_config.tol_fraction
        )
        for video, masks in dataset
    )
    reports = [
        SequenceReport(seq_id=video.seq_id, length=video.T, scores=scores)
        for (video, _), scores in zip(dataset, scored)
    ]
    for report in reports:
        logger.info(f"{report.seq_id}: J={report.mean_J:.4f} F={report.mean_F:.4f}")

    # dataset means average the per-sequence means
    mean_J = float(np.mean([r.mean_J for r in reports])) if reports else 0.0
    mean_F = float(np.mean([r.mean_F for r in reports])) if reports else 0.0
    gt_areas: Dict[str, np.ndarray] = {video.seq_id: masks.areas() for video, masks in dataset}
    return MetricsReport(
        per_sequence={r.seq_id: r.scores for r in reports},
        mean_J=mean_J,
        mean_F=mean_F,
        mean_JF=(mean_J + mean_F) / 2.0,
        length_split=length_analysis(reports, eval_config.early_cut, eval_config.late_cut, eval_config.min_len),
        occlusion_split=occlusion_analysis(reports, gt_areas, eval_config.occlusion_thresholds),
        length_histogram=length_histogram(dataset),
        occlusion_durations=occlusion_duration_histogram(gt_areas, eval_config.occlusion_thresholds),
    )


def evaluate_dataset(
    net: HS2SNet, dataset: Sequence[SequencePair], eval_config: Optional[EvalConfig] = None
) -> MetricsReport:
    predictions = {video.seq_id: predict_sequence(net, video, masks.masks[0]) for video, masks in dataset}
    report = build_report(predictions, dataset, eval_config)
    logger.info(f"evaluated {len(dataset)} sequences: J={report.mean_J:.4f} F={report.mean_F:.4f}")
    return report
