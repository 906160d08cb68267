"""
Versioned checkpoint container.

The file is a plain dict of primitives and tensors so it loads with
`torch.load(weights_only=True)`.
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import torch

from configuration import Configuration as Config
from exceptions import (
    CheckpointConfigMismatchError,
    CheckpointShapeError,
    CheckpointVersionError,
    ConfigurationError,
    CorruptCheckpointError,
)
from loggers.training_logger import training_logger as logger
from models.enums import Variant
from models.model_config import ModelConfig
from models.train_config import Checkpoint, ScheduleState
from network.hs2s import HS2SNet

REQUIRED_KEYS = ("version", "model_config", "model_state", "schedule", "step")


def save_checkpoint(ckpt: Checkpoint, path: Union[str, Path]) -> Path:
    path = Path(path)
    payload: Dict[str, Any] = {
        "version": Config.checkpoint_version,
        "model_config": ckpt.model_config.to_dict(),
        "model_state": dict(ckpt.model_state),
        "optimizer_state": ckpt.optimizer_state,
        "lr_scheduler_state": ckpt.lr_scheduler_state,
        "schedule": ckpt.schedule.to_dict(),
        "step": int(ckpt.step),
        "metrics": dict(ckpt.metrics),
    }
    tmp = path.with_name(path.name + ".tmp")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save(payload, tmp)
        os.replace(tmp, path)
    except OSError as e:
        raise OSError(f"Could not write checkpoint {path}: {e}") from e
    logger.info(f"saved checkpoint at step {ckpt.step} to {path}")
    return path


def validate_state(config: ModelConfig, state: Mapping[str, torch.Tensor]) -> None:
    """Reject a state dict whose tensor names or shapes differ from what `config` builds."""
    expected = {name: tuple(t.shape) for name, t in HS2SNet(config).state_dict().items()}
    for name, shape in expected.items():
        if name not in state:
            raise CheckpointShapeError(name, f"missing for a {config.variant.value} model")
        got = tuple(state[name].shape)
        if got != shape:
            raise CheckpointShapeError(name, f"expected {shape}, found {got}")
    for name in state:
        if name not in expected:
            raise CheckpointShapeError(name, f"not part of a {config.variant.value} model")


def load_checkpoint(path: Union[str, Path]) -> Checkpoint:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"Checkpoint not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CorruptCheckpointError(f"could not read checkpoint {path}: {e}") from e
    if not isinstance(payload, dict) or any(k not in payload for k in REQUIRED_KEYS):
        raise CorruptCheckpointError(f"{path} is not an hs2s checkpoint")
    if payload["version"] != Config.checkpoint_version:
        raise CheckpointVersionError(
            f"{path} has version {payload['version']}, this build reads version {Config.checkpoint_version}"
        )
    try:
        model_config = ModelConfig.from_dict(payload["model_config"])
    except (ConfigurationError, TypeError) as e:
        raise CorruptCheckpointError(f"{path} carries an invalid model config: {e}") from e
    validate_state(model_config, payload["model_state"])
    return Checkpoint(
        model_config=model_config,
        model_state=payload["model_state"],
        optimizer_state=payload.get("optimizer_state"),
        lr_scheduler_state=payload.get("lr_scheduler_state"),
        schedule=ScheduleState.from_dict(payload["schedule"]),
        step=int(payload["step"]),
        metrics=dict(payload.get("metrics") or {}),
    )


def model_from_checkpoint(ckpt: Checkpoint, variant_override: Optional[Variant] = None) -> HS2SNet:
    config = ckpt.model_config
    if variant_override is not None:
        config = config.with_variant(variant_override)
        validate_state(config, ckpt.model_state)
    net = HS2SNet(config)
    net.load_state_dict(ckpt.model_state)
    return net


def check_model_section(config: ModelConfig, section: Mapping[str, Any]) -> None:
    """Every key a run config sets under [model] must agree with the checkpoint's model config."""
    if not section:
        return
    have = config.to_dict()
    want = ModelConfig.from_dict(dict(section)).to_dict()
    for key in sorted(section):
        if have.get(key) != want.get(key):
            raise CheckpointConfigMismatchError(key, have.get(key), want.get(key))
