from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from joblib import Parallel, delayed
from torch.nn.utils import clip_grad_norm_
from torch.optim import Adam
from torch.optim.lr_scheduler import ReduceLROnPlateau

from configuration import Configuration as Config
from exceptions import ConfigurationError, DatasetValidationError, NonFiniteLossError
from loggers.training_logger import training_logger as logger
from losses.border import border_targets
from losses.objective import snippet_loss
from models.loss_config import BorderTargets, LossConfig
from models.model_config import ModelConfig
from models.sequence import SequencePair
from models.synth_config import AugConfig
from models.train_config import Checkpoint, ScheduleState, StepMetrics, TrainConfig
from network.hs2s import HS2SNet
from network.params import build_model
from synthdata.augmentation import augment
from synthdata.snippets import sample_snippet
from training.checkpoint import load_checkpoint, model_from_checkpoint, save_checkpoint
from training.metrics_log import MetricsLog
from training.schedule import advance, initial_schedule, p_gt_at, teacher_forcing_policy
from utils import derive_seed

# independent random streams per (seed, step, item)
_SNIPPET_STREAM = 0
_AUGMENT_STREAM = 1
_FEED_STREAM = 2


@dataclass
class PreparedSnippet:
    seq_id: str
    frames: np.ndarray  # [L, 3, H, W]
    masks: np.ndarray  # [L, 1, H, W]
    targets: BorderTargets  # border classes of frames 1..L-1


def prepare_snippet(
    pair: SequencePair, train_config: TrainConfig, aug: AugConfig, loss_config: LossConfig, seed: int
) -> PreparedSnippet:
    video, masks = sample_snippet(
        pair, train_config.snippet_min, train_config.snippet_max, seed=derive_seed(seed, _SNIPPET_STREAM)
    )
    frames, mask_arr = augment(video.frames, masks.masks, aug, derive_seed(seed, _AUGMENT_STREAM))
    if not mask_arr[0].any():
        # the transform pushed the object out of the first frame
        frames, mask_arr = video.frames, masks.masks
    return PreparedSnippet(
        seq_id=video.seq_id,
        frames=frames,
        masks=mask_arr,
        targets=border_targets(mask_arr[1:], loss_config.border_bin_edges),
    )


def assemble_batch(
    dataset: Sequence[SequencePair],
    step: int,
    train_config: TrainConfig,
    aug: AugConfig,
    loss_config: LossConfig,
    n_jobs: Optional[int] = None,
) -> List[PreparedSnippet]:
    picks = np.random.default_rng(derive_seed(train_config.seed, step)).integers(
        len(dataset), size=train_config.batch_size
    )
    return Parallel(n_jobs=n_jobs or Config.num_workers)(
        delayed(prepare_snippet)(dataset[i], train_config, aug, loss_config, derive_seed(train_config.seed, step, k))
        for k, i in enumerate(picks)
    )


def train_step(
    net: HS2SNet,
    optimizer: torch.optim.Optimizer,
    batch: Sequence[PreparedSnippet],
    schedule: ScheduleState,
    train_config: TrainConfig,
    loss_config: LossConfig,
) -> Tuple[ScheduleState, StepMetrics]:
    """
    One optimisation step over a batch of snippets; parameters and optimiser state update in place.

    Each snippet runs with its own teacher-forcing draw. The batch loss is the
    mean of the snippet losses; gradients are accumulated snippet by snippet.
    """
    net.train()
    dtype = next(net.parameters()).dtype
    optimizer.zero_grad(set_to_none=True)
    totals, segs, auxs = [], [], []
    for k, snippet in enumerate(batch):
        frames = torch.from_numpy(np.ascontiguousarray(snippet.frames)).to(dtype)
        masks = torch.from_numpy(np.ascontiguousarray(snippet.masks)).to(dtype)
        feed = teacher_forcing_policy(
            schedule, train_config, derive_seed(train_config.seed, schedule.step, k, _FEED_STREAM), len(frames)
        )
        out = net.forward_sequence(frames, masks[0], mask_feed=feed, gt_masks=masks)
        try:
            loss = snippet_loss(out.fg_probs, out.aux_logits, masks[1:], snippet.targets, loss_config, snippet.seq_id)
        except NonFiniteLossError as e:
            logger.error(f"step {schedule.step}: {e}")
            raise
        (loss.total / len(batch)).backward()
        totals.append(loss.total.item())
        segs.append(loss.seg.item())
        auxs.append(loss.aux.item())

    params = [p for p in net.parameters() if p.grad is not None]
    max_norm = train_config.grad_clip_norm if train_config.clipping_enabled else float("inf")
    grad_norm = float(clip_grad_norm_(params, max_norm)) if params else 0.0
    optimizer.step()

    metrics = StepMetrics(
        step=schedule.step,
        loss_total=float(np.mean(totals)),
        loss_seg=float(np.mean(segs)),
        loss_aux=float(np.mean(auxs)),
        p_gt=p_gt_at(schedule.step, train_config),
        lr=float(optimizer.param_groups[0]["lr"]),
        grad_norm=grad_norm,
    )
    return advance(schedule, train_config), metrics


def make_optimizer(net: HS2SNet, train_config: TrainConfig) -> Tuple[Adam, ReduceLROnPlateau]:
    optimizer = Adam(net.parameters(), lr=train_config.lr)
    scheduler = ReduceLROnPlateau(
        optimizer, mode="min", factor=train_config.lr_decay_factor, patience=train_config.lr_patience
    )
    return optimizer, scheduler


def snapshot(
    net: HS2SNet,
    optimizer: torch.optim.Optimizer,
    scheduler: ReduceLROnPlateau,
    schedule: ScheduleState,
    metrics: dict,
) -> Checkpoint:
    return Checkpoint(
        model_config=net.config,
        model_state={k: v.detach().clone() for k, v in net.state_dict().items()},
        optimizer_state=optimizer.state_dict(),
        lr_scheduler_state=scheduler.state_dict(),
        schedule=schedule,
        step=schedule.step,
        metrics=dict(metrics),
    )


@dataclass
class TrainResult:
    net: HS2SNet
    checkpoint: Checkpoint
    history: List[StepMetrics] = field(default_factory=list)


def train(
    dataset: Sequence[SequencePair],
    train_config: TrainConfig,
    model_config: ModelConfig,
    loss_config: Optional[LossConfig] = None,
    aug_config: Optional[AugConfig] = None,
    out_dir: Optional[Union[str, Path]] = None,
    resume_from: Optional[Union[str, Path]] = None,
) -> TrainResult:
    """
    Snippet sampling, augmentation and train_step until max_steps.

    With `out_dir` set, the metrics log and checkpoints (every
    `checkpoint_every` steps, plus `last.pt` at the end) are written there.
    `resume_from` restores model, optimiser, plateau scheduler and schedule
    state and appends to the existing metrics log.
    """
    loss_config = loss_config or LossConfig()
    aug_config = aug_config or AugConfig()
    if not dataset:
        raise DatasetValidationError("cannot train on an empty dataset")
    if loss_config.aux_classes != model_config.aux_classes:
        raise ConfigurationError(
            "aux_classes",
            f"model has {model_config.aux_classes} border classes, loss bins give {loss_config.aux_classes}",
        )

    if resume_from is not None:
        ckpt = load_checkpoint(resume_from)
        net = model_from_checkpoint(ckpt)
        optimizer, scheduler = make_optimizer(net, train_config)
        if ckpt.optimizer_state:
            optimizer.load_state_dict(ckpt.optimizer_state)
        if ckpt.lr_scheduler_state:
            scheduler.load_state_dict(ckpt.lr_scheduler_state)
        schedule = ckpt.schedule
        smoothed = ckpt.metrics.get("smoothed_loss")
        logger.info(f"resuming from {resume_from} at step {schedule.step}")
    else:
        net = build_model(model_config, train_config.seed)
        optimizer, scheduler = make_optimizer(net, train_config)
        schedule = initial_schedule(train_config)
        smoothed = None

    ckpt_dir = log = None
    if out_dir is not None:
        ckpt_dir = Path(out_dir, Config.checkpoints_folder_name)
        ckpt_dir.mkdir(parents=True, exist_ok=True)
        log = MetricsLog(Path(out_dir, Config.metrics_log_file_name), append=resume_from is not None)

    def metrics_snapshot() -> dict:
        return {} if smoothed is None else {"smoothed_loss": smoothed}

    history: List[StepMetrics] = []
    while schedule.step < train_config.max_steps:
        batch = assemble_batch(dataset, schedule.step, train_config, aug_config, loss_config)
        try:
            next_schedule, metrics = train_step(net, optimizer, batch, schedule, train_config, loss_config)
        except NonFiniteLossError:
            # the failing step never reached optimizer.step, so the weights are still the last good ones
            if ckpt_dir is not None:
                save_checkpoint(
                    snapshot(net, optimizer, scheduler, schedule, metrics_snapshot()),
                    Path(ckpt_dir, Config.last_checkpoint_file_name),
                )
            raise
        schedule = next_schedule
        history.append(metrics)
        if log is not None:
            log.write(metrics)

        s = train_config.loss_smoothing
        smoothed = metrics.loss_total if smoothed is None else s * smoothed + (1.0 - s) * metrics.loss_total
        lr_before = optimizer.param_groups[0]["lr"]
        scheduler.step(smoothed)
        lr_after = optimizer.param_groups[0]["lr"]
        if lr_after < lr_before:
            logger.info(f"step {metrics.step}: plateau, learning rate {lr_before:.3g} -> {lr_after:.3g}")

        if metrics.step % train_config.log_every == 0:
            logger.info(
                f"step {metrics.step}: loss={metrics.loss_total:.4f} seg={metrics.loss_seg:.4f} "
                f"aux={metrics.loss_aux:.4f} p_gt={metrics.p_gt:.3f} lr={metrics.lr:.3g}"
            )
        if ckpt_dir is not None and schedule.step % train_config.checkpoint_every == 0:
            save_checkpoint(
                snapshot(net, optimizer, scheduler, schedule, metrics_snapshot()),
                Path(ckpt_dir, Config.checkpoint_file_pattern.format(schedule.step)),
            )

    final = snapshot(net, optimizer, scheduler, schedule, metrics_snapshot())
    if ckpt_dir is not None:
        save_checkpoint(final, Path(ckpt_dir, Config.last_checkpoint_file_name))
    logger.info(f"training finished at step {schedule.step}")
    return TrainResult(net=net, checkpoint=final, history=history)
