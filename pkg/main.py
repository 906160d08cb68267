import functools
from dataclasses import replace
from pathlib import Path

import click

from artifact_generators import ablation_gen, overlay_gen, report_gen
from configuration import Configuration as Config
from evaluation import runner
from exceptions import CheckpointError, NonFiniteLossError
from loggers.main_logger import main_logger as logger
from models.enums import Variant
from models.run_config import RunConfig, load_run_config, read_section, write_resolved_config
from synthdata import dataset_io, generator
from timer import Timer
from training import checkpoint, trainer
from utils import hash_directory, prepare_output_dir

# every library error derives from one of these
HANDLED_ERRORS = (
    CheckpointError,
    NonFiniteLossError,
    OSError,
    ValueError,
)


def timed_command(name):
    """Time the command and turn the known failure types into a logged, nonzero exit."""

    def decorate(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            timer = Timer(logger)
            timer.start(f"starting {name}")
            try:
                return func(*args, **kwargs)
            except HANDLED_ERRORS as e:
                logger.error(f"{name} failed: {e}")
                raise click.ClickException(str(e)) from e
            finally:
                timer.stop(f"stopping {name}")
                logger.info(timer.elapsed(f"Elapsed time for {name}:"))

        return wrapper

    return decorate


def _existing_dir(path: Path, what: str) -> Path:
    if not Path(path).is_dir():
        raise FileNotFoundError(f"{what} not found: {path}")
    return Path(path)


@click.group(name="hs2s")
def cli():
    """Hybrid sequence-to-sequence video object segmentation at desk scale."""


@cli.command("gen-data")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None, help="Run config (TOML).")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True, help="Dataset root to create.")
@click.option("--n", "n_sequences", type=int, default=None, help="Number of sequences (overrides dataset.n_sequences).")
@click.option("--seed", type=int, default=None, help="Dataset seed (overrides synth.seed).")
@click.option("--force", is_flag=True, help="Overwrite a non-empty output directory.")
@timed_command("gen-data")
def gen_data(config_path, out_dir, n_sequences, seed, force):
    config = load_run_config(config_path)
    if seed is not None:
        config = replace(config, synth=replace(config.synth, seed=seed))
    if n_sequences is not None:
        config = replace(config, dataset=replace(config.dataset, n_sequences=n_sequences))
    out_dir = prepare_output_dir(out_dir, force=force)

    pairs = generator.generate_dataset(config.synth, config.dataset, config.synth.seed)
    manifest = dataset_io.write_dataset(pairs, out_dir)
    write_resolved_config(config, out_dir)
    lengths = [e.length for e in manifest.sequences]
    click.echo(
        f"wrote {len(lengths)} sequences to {out_dir}"
        + (f" (lengths {min(lengths)}-{max(lengths)}, {sum(lengths)} frames)" if lengths else "")
    )


@cli.command("train")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None, help="Run config (TOML).")
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True, help="Dataset root.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True, help="Run directory.")
@click.option("--resume", "resume_from", type=click.Path(path_type=Path), default=None, help="Checkpoint to resume.")
@click.option("--force", is_flag=True, help="Overwrite a non-empty run directory.")
@timed_command("train")
def train(config_path, data_dir, out_dir, resume_from, force):
    config = load_run_config(config_path)
    dataset = dataset_io.load_dataset(_existing_dir(data_dir, "data directory"))
    if resume_from is None:
        out_dir = prepare_output_dir(out_dir, force=force)
    else:
        ckpt = checkpoint.load_checkpoint(resume_from)
        checkpoint.check_model_section(ckpt.model_config, read_section(config_path, "model"))
        config = replace(config, model=ckpt.model_config)
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    write_resolved_config(config, out_dir)

    try:
        result = trainer.train(
            dataset, config.train, config.model, config.loss, config.aug, out_dir=out_dir, resume_from=resume_from
        )
    except NonFiniteLossError as e:
        last = Path(out_dir, Config.checkpoints_folder_name, Config.last_checkpoint_file_name)
        raise NonFiniteLossError(f"{e}; last good checkpoint kept at {last}") from e
    final = result.history[-1] if result.history else None
    click.echo(
        f"trained to step {result.checkpoint.step}"
        + (f", final loss {final.loss_total:.4f}" if final else "")
        + f"; checkpoints in {Path(out_dir, Config.checkpoints_folder_name)}"
    )


@cli.command("eval")
@click.option("--checkpoint", "checkpoint_path", type=click.Path(path_type=Path), required=True)
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True, help="Dataset root.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True, help="Report directory.")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None, help="Run config for [eval].")
@click.option(
    "--variant-override",
    type=click.Choice([v.value for v in Variant]),
    default=None,
    help="Evaluate the checkpoint as another variant; must have the same parameter set.",
)
@timed_command("eval")
def evaluate(checkpoint_path, data_dir, out_dir, config_path, variant_override):
    config = load_run_config(config_path)
    ckpt = checkpoint.load_checkpoint(checkpoint_path)
    net = checkpoint.model_from_checkpoint(ckpt, Variant(variant_override) if variant_override else None)
    checkpoint.check_model_section(net.config, read_section(config_path, "model"))
    dataset = dataset_io.load_dataset(_existing_dir(data_dir, "data directory"))
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    write_resolved_config(replace(config, model=net.config), out_dir)

    report = runner.evaluate_dataset(net, dataset, config.eval)
    report_gen.write_eval_artifacts(report, out_dir)
    click.echo(f"J={report.mean_J:.4f} F={report.mean_F:.4f} J&F={report.mean_JF:.4f} ({len(dataset)} sequences)")


@cli.command("overlay")
@click.option("--checkpoint", "checkpoint_path", type=click.Path(path_type=Path), required=True)
@click.option("--sequence", "sequence_dir", type=click.Path(path_type=Path), required=True, help="sequences/<id> dir.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True, help="Overlay directory.")
@timed_command("overlay")
def overlay(checkpoint_path, sequence_dir, out_dir):
    ckpt = checkpoint.load_checkpoint(checkpoint_path)
    net = checkpoint.model_from_checkpoint(ckpt)
    video, masks = dataset_io.load_sequence_dir(_existing_dir(sequence_dir, "sequence directory"))
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    write_resolved_config(RunConfig(model=net.config), out_dir)

    predictions = runner.predict_sequence(net, video, masks.masks[0])
    paths = overlay_gen.render_overlays(video.frames, masks.masks[0], predictions, out_dir, seq_id=video.seq_id)
    click.echo(f"wrote {len(paths)} overlays to {out_dir}")


@cli.command("ablate")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None, help="Run config (TOML).")
@click.option("--data", "data_dir", type=click.Path(path_type=Path), required=True, help="Dataset root.")
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True, help="Ablation directory.")
@click.option("--force", is_flag=True, help="Overwrite a non-empty output directory.")
@timed_command("ablate")
def ablate(config_path, data_dir, out_dir, force):
    config = load_run_config(config_path)
    data_dir = _existing_dir(data_dir, "data directory")
    dataset = dataset_io.load_dataset(data_dir)
    out_dir = prepare_output_dir(out_dir, force=force)
    write_resolved_config(config, out_dir)

    rows = ablation_gen.run_ablation(config, dataset, hash_directory(data_dir), out_dir)
    for row in rows:
        click.echo(
            f"{row.variant.value:<16} "
            + (f"J={row.J:.4f} F={row.F:.4f} J&F={row.JF:.4f}" if row.ok else f"FAILED: {row.error}")
        )
    failed = [row.variant.value for row in rows if not row.ok]
    if failed:
        logger.error(f"ablation arms failed: {', '.join(failed)}")
        raise click.ClickException(f"{len(failed)} ablation arm(s) failed: {', '.join(failed)}")


if __name__ == "__main__":
    cli()
