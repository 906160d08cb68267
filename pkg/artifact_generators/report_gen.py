from __future__ import annotations

import csv
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from configuration import Configuration as Config  # noqa: E402
from loggers.evaluation_logger import evaluation_logger as logger  # noqa: E402
from models.scores import LengthSplit, MetricsReport, OcclusionSplit  # noqa: E402
from utils import write_json_file  # noqa: E402

REPORT_FIELDS: List[str] = ["seq_id", "t", "J", "F"]
LENGTH_FIELDS: List[str] = ["F_early", "J_early", "F_late", "J_late", "n_sequences", "status"]


def format_cell(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_rows(csv_path: Union[str, Path], fieldnames: List[str], rows: List[dict], encoding: str = "utf-8") -> Path:
    out_path = Path(csv_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    try:
        with out_path.open("w", newline="", encoding=encoding) as f:
            writer = csv.DictWriter(f, fieldnames=fieldnames)
            writer.writeheader()
            for row in rows:
                writer.writerow(row)
    except OSError as e:
        raise OSError(f"Could not write {out_path}: {e}") from e
    logger.info(f"Successfully generated file: {out_path}")
    return out_path


def occlusion_fields(thresholds) -> List[str]:
    return ["avg", *(f"th_{th}" for th in thresholds)]


def write_report_csv(report: MetricsReport, csv_path: Union[str, Path]) -> Path:
    rows = [
        {"seq_id": seq_id, "t": s.t, "J": repr(s.J), "F": repr(s.F)}
        for seq_id, scores in report.per_sequence.items()
        for s in scores
    ]
    return write_rows(csv_path, REPORT_FIELDS, rows)


def length_row(split: LengthSplit) -> dict:
    return {
        "F_early": format_cell(split.F_early),
        "J_early": format_cell(split.J_early),
        "F_late": format_cell(split.F_late),
        "J_late": format_cell(split.J_late),
        "n_sequences": split.n_sequences,
        "status": "empty" if split.is_empty else "ok",
    }


def occlusion_row(split: OcclusionSplit) -> dict:
    row = {"avg": format_cell(split.avg)}
    row.update({f"th_{th}": format_cell(v) for th, v in split.by_threshold.items()})
    return row


def write_length_table(split: LengthSplit, csv_path: Union[str, Path]) -> Path:
    return write_rows(csv_path, LENGTH_FIELDS, [length_row(split)])


def write_occlusion_table(split: OcclusionSplit, csv_path: Union[str, Path]) -> Path:
    return write_rows(csv_path, occlusion_fields(split.by_threshold), [occlusion_row(split)])


def write_length_histogram(histogram: Mapping[int, int], csv_path: Path, png_path: Path) -> None:
    write_rows(csv_path, ["length", "count"], [{"length": k, "count": v} for k, v in histogram.items()])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.bar(list(histogram.keys()), list(histogram.values()), color="tab:blue")
    ax.set_xlabel("sequence length (frames)")
    ax.set_ylabel("objects")
    ax.set_title("Sequence length per object")
    fig.tight_layout()
    fig.savefig(png_path, dpi=100)
    plt.close(fig)


def write_occlusion_histogram(histogram: Mapping[int, Mapping[int, int]], csv_path: Path, png_path: Path) -> None:
    rows = [
        {"threshold": th, "duration": d, "count": c} for th, durations in histogram.items() for d, c in durations.items()
    ]
    write_rows(csv_path, ["threshold", "duration", "count"], rows)
    fig, ax = plt.subplots(figsize=(6, 3.5))
    width = 0.8 / max(len(histogram), 1)
    for i, (th, durations) in enumerate(histogram.items()):
        ax.bar([d + i * width for d in durations], list(durations.values()), width=width, label=f"area <= {th}")
    ax.set_xlabel("occlusion length (frames)")
    ax.set_ylabel("events")
    ax.set_title("Occlusion durations")
    if histogram:
        ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=100)
    plt.close(fig)


def write_eval_artifacts(report: MetricsReport, out_dir: Union[str, Path]) -> Dict[str, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "report_json": write_json_file(Path(out_dir, Config.report_json_file_name), report.to_dict()),
        "report_csv": write_report_csv(report, Path(out_dir, Config.report_csv_file_name)),
        "length_table": write_length_table(report.length_split, Path(out_dir, Config.length_table_file_name)),
        "occlusion_table": write_occlusion_table(
            report.occlusion_split, Path(out_dir, Config.occlusion_table_file_name)
        ),
    }
    write_length_histogram(
        report.length_histogram,
        Path(out_dir, Config.length_histogram_file_name),
        Path(out_dir, Config.length_histogram_png_name),
    )
    write_occlusion_histogram(
        report.occlusion_durations,
        Path(out_dir, Config.occlusion_histogram_file_name),
        Path(out_dir, Config.occlusion_histogram_png_name),
    )
    paths["length_histogram"] = Path(out_dir, Config.length_histogram_file_name)
    paths["occlusion_histogram"] = Path(out_dir, Config.occlusion_histogram_file_name)
    return paths
