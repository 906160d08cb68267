from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Optional, Union

import jsonschema
import toml

from configuration import Configuration as Config
from exceptions import ConfigurationError
from models.eval_config import EvalConfig
from models.loss_config import LossConfig
from models.model_config import ModelConfig
from models.synth_config import AugConfig, DatasetConfig, SynthConfig
from models.train_config import AblationConfig, TrainConfig
from utils import read_json_file


@dataclass(frozen=True)
class RunConfig:
    """One TOML document, one table per component; every key is optional."""

    synth: SynthConfig = field(default_factory=SynthConfig)
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    aug: AugConfig = field(default_factory=AugConfig)
    model: ModelConfig = field(default_factory=ModelConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)

    def __post_init__(self) -> None:
        if self.loss.aux_classes != self.model.aux_classes:
            raise ConfigurationError(
                "model.aux_classes",
                f"{self.model.aux_classes} classes, but loss.border_bin_edges defines {self.loss.aux_classes}",
            )

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "RunConfig":
        data = dict(data or {})
        validate_run_config(data)
        sections = {}
        for f in fields(cls):
            try:
                sections[f.name] = f.default_factory.from_dict(data.get(f.name))
            except ConfigurationError as e:
                raise ConfigurationError(f"{f.name}.{e.field}", e.message) from e
        return cls(**sections)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name).to_dict() for f in fields(self)}


def validate_run_config(data: Dict[str, Any]) -> None:
    schema = read_json_file(Path(Config.templates_dir, Config.run_config_schema_name))
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as e:
        where = ".".join(str(p) for p in e.absolute_path) or "<root>"
        raise ConfigurationError(where, e.message) from e


def load_toml(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        return toml.load(path)
    except FileNotFoundError:
        raise FileNotFoundError(f"Config file not found: {path}") from None
    except toml.TomlDecodeError as e:
        raise ConfigurationError("<file>", f"invalid TOML in {path}: {e}") from e


def load_run_config(path: Optional[Union[str, Path]] = None) -> RunConfig:
    if path is None:
        return RunConfig()
    return RunConfig.from_dict(load_toml(path))


def write_resolved_config(config: RunConfig, out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir, Config.resolved_config_file_name)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(toml.dumps(config.to_dict()), encoding="utf-8")
    except OSError as e:
        raise OSError(f"Could not write resolved config {path}: {e}") from e
    return path


def read_section(path: Optional[Union[str, Path]], name: str) -> Dict[str, Any]:
    """The keys a config file sets explicitly under [name]; defaults are not filled in."""
    if path is None:
        return {}
    return dict(load_toml(path).get(name) or {})
