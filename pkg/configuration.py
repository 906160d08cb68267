import os
from pathlib import Path

from root import get_project_root


class Configuration:
    # DIRECTORIES
    root_dir = get_project_root()
    input_dir = Path(root_dir, "input")
    log_dir = Path(os.getenv("HS2S_LOG_DIR", Path(root_dir, "logs")))
    templates_dir = Path(root_dir, "templates")
    configs_dir = Path(input_dir, "configs")

    # WORKERS
    num_workers = max(1, int(os.getenv("HS2S_NUM_WORKERS", "1") or "1"))

    # DATASET LAYOUT
    manifest_file_name = "manifest.json"
    sequences_folder_name = "sequences"
    frames_folder_name = "frames"
    masks_folder_name = "masks"
    frame_file_pattern = "{:05d}.png"
    manifest_schema_name = "manifest_schema.json"

    # RUN CONFIG
    run_config_schema_name = "run_config_schema.json"
    resolved_config_file_name = "resolved_config.toml"

    # CHECKPOINTS
    checkpoint_version = 1
    checkpoints_folder_name = "checkpoints"
    last_checkpoint_file_name = "last.pt"
    checkpoint_file_pattern = "step_{:07d}.pt"

    # TRAINING OUTPUT
    metrics_log_file_name = "metrics.csv"
    metrics_log_fields = ["step", "loss_total", "loss_seg", "loss_aux", "p_gt", "lr"]

    # EVALUATION OUTPUT
    report_json_file_name = "report.json"
    report_csv_file_name = "report.csv"
    length_table_file_name = "length_analysis.csv"
    occlusion_table_file_name = "occlusion_analysis.csv"
    length_histogram_file_name = "length_histogram.csv"
    length_histogram_png_name = "length_histogram.png"
    occlusion_histogram_file_name = "occlusion_durations.csv"
    occlusion_histogram_png_name = "occlusion_durations.png"

    # ABLATION OUTPUT
    ablation_table_file_name = "ablation.csv"
    ablation_length_file_name = "ablation_length.csv"
    ablation_occlusion_file_name = "ablation_occlusion.csv"
