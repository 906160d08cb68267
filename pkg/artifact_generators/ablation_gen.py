"""
Variant ablation: every variant is trained and evaluated on the same data
with the same seeds, and the seed-averaged scores land in three CSV tables
(overall, sequence length, occlusion).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from artifact_generators.report_gen import LENGTH_FIELDS, format_cell, write_rows, length_row, occlusion_fields, occlusion_row
from configuration import Configuration as Config
from evaluation.runner import evaluate_dataset
from loggers.evaluation_logger import evaluation_logger as logger
from models.enums import Variant
from models.run_config import RunConfig
from models.scores import LengthSplit, MetricsReport, OcclusionSplit
from models.sequence import SequencePair
from synthdata.snippets import split_dataset
from training.trainer import train

ABLATION_FIELDS: List[str] = ["variant", "J", "F", "JF", "J_late", "post_occlusion_JF", "dataset_hash", "status"]


@dataclass
class AblationRow:
    variant: Variant
    dataset_hash: str
    J: Optional[float] = None
    F: Optional[float] = None
    J_late: Optional[float] = None
    post_occlusion_JF: Optional[float] = None
    length_split: LengthSplit = field(default_factory=LengthSplit)
    occlusion_split: Optional[OcclusionSplit] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def JF(self) -> Optional[float]:
        return None if self.J is None or self.F is None else (self.J + self.F) / 2.0

    def table_row(self) -> dict:
        return {
            "variant": self.variant.value,
            "J": format_cell(self.J),
            "F": format_cell(self.F),
            "JF": format_cell(self.JF),
            "J_late": format_cell(self.J_late),
            "post_occlusion_JF": format_cell(self.post_occlusion_JF),
            "dataset_hash": self.dataset_hash,
            "status": "ok" if self.ok else f"failed: {self.error}",
        }


def _seed_mean(values: Sequence[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    return float(np.mean(present)) if present else None


def held_out_split(dataset: Sequence[SequencePair], seed: int):
    """80:20 split; with no held-out sequences left the training set is evaluated instead."""
    train_set, val_set = split_dataset(dataset, 0.8, seed)
    return train_set, (val_set or train_set)


def average_reports(variant: Variant, dataset_hash: str, reports: Sequence[MetricsReport], th: int) -> AblationRow:
    splits = [r.length_split for r in reports]
    occl = [r.occlusion_split for r in reports]
    thresholds = list(occl[0].by_threshold) if occl else []
    length = LengthSplit(
        F_early=_seed_mean([s.F_early for s in splits]),
        J_early=_seed_mean([s.J_early for s in splits]),
        F_late=_seed_mean([s.F_late for s in splits]),
        J_late=_seed_mean([s.J_late for s in splits]),
        n_sequences=max((s.n_sequences for s in splits), default=0),
    )
    occlusion = OcclusionSplit(
        avg=_seed_mean([o.avg for o in occl]),
        by_threshold={t: _seed_mean([o.by_threshold.get(t) for o in occl]) for t in thresholds},
        n_sequences={t: max(o.n_sequences.get(t, 0) for o in occl) for t in thresholds},
    )
    return AblationRow(
        variant=variant,
        dataset_hash=dataset_hash,
        J=_seed_mean([r.mean_J for r in reports]),
        F=_seed_mean([r.mean_F for r in reports]),
        J_late=length.J_late,
        post_occlusion_JF=occlusion.by_threshold.get(th),
        length_split=length,
        occlusion_split=occlusion,
    )


def run_variant(
    variant: Variant,
    config: RunConfig,
    dataset: Sequence[SequencePair],
    dataset_hash: str,
    out_dir: Union[str, Path],
) -> AblationRow:
    reports: List[MetricsReport] = []
    try:
        for seed in config.ablation.seeds:
            train_set, eval_set = held_out_split(dataset, seed)
            run_dir = Path(out_dir, variant.value, f"seed_{seed}")
            result = train(
                train_set,
                replace(config.train, seed=seed),
                config.model.with_variant(variant),
                config.loss,
                config.aug,
                out_dir=run_dir,
            )
            reports.append(evaluate_dataset(result.net, eval_set, config.eval))
            logger.info(f"{variant.value} seed {seed}: J={reports[-1].mean_J:.4f} F={reports[-1].mean_F:.4f}")
    except Exception as e:
        logger.error(f"ablation arm {variant.value} failed: {e}")
        return AblationRow(variant=variant, dataset_hash=dataset_hash, error=str(e))
    first_th = config.eval.occlusion_thresholds[0] if config.eval.occlusion_thresholds else 0
    return average_reports(variant, dataset_hash, reports, first_th)


def write_ablation_tables(rows: Sequence[AblationRow], out_dir: Union[str, Path], thresholds) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    length_rows = []
    occlusion_rows = []
    for row in rows:
        length_rows.append({"variant": row.variant.value, **length_row(row.length_split)})
        occl = row.occlusion_split or OcclusionSplit(avg=None, by_threshold={int(t): None for t in thresholds})
        occlusion_rows.append({"variant": row.variant.value, **occlusion_row(occl)})
    return {
        "ablation": write_rows(
            Path(out_dir, Config.ablation_table_file_name), ABLATION_FIELDS, [r.table_row() for r in rows]
        ),
        "length": write_rows(
            Path(out_dir, Config.ablation_length_file_name), ["variant", *LENGTH_FIELDS], length_rows
        ),
        "occlusion": write_rows(
            Path(out_dir, Config.ablation_occlusion_file_name),
            ["variant", *occlusion_fields(thresholds)],
            occlusion_rows,
        ),
    }


def run_ablation(
    config: RunConfig,
    dataset: Sequence[SequencePair],
    dataset_hash: str,
    out_dir: Union[str, Path],
    n_jobs: Optional[int] = None,
) -> List[AblationRow]:
    """Runs the arms sequentially, or in parallel processes with disjoint output subdirectories."""
    rows = Parallel(n_jobs=n_jobs or Config.num_workers)(
        delayed(run_variant)(variant, config, dataset, dataset_hash, out_dir) for variant in config.ablation.variants
    )
    write_ablation_tables(rows, out_dir, config.eval.occlusion_thresholds)
    return list(rows)
