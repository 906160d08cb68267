from pathlib import Path
from typing import Optional, Union


class ConfigurationError(ValueError):
    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"invalid configuration field '{field}': {message}")
        self.field = field
        self.message = message


class DatasetValidationError(ValueError):
    pass


class MissingFileError(DatasetValidationError):
    def __init__(self, path: Union[str, Path]) -> None:
        super().__init__(f"missing file: {path}")
        self.path = Path(path)


class CountMismatchError(DatasetValidationError):
    pass


class FrameSizeError(DatasetValidationError):
    pass


class ShapeMismatchError(ValueError):
    pass


class MissingReferenceError(ValueError):
    pass


class SnippetError(ValueError):
    pass


class CheckpointError(Exception):
    pass


class CorruptCheckpointError(CheckpointError):
    pass


class CheckpointVersionError(CheckpointError):
    pass


class CheckpointShapeError(CheckpointError):
    def __init__(self, tensor_name: str, message: str) -> None:
        super().__init__(f"shape mismatch for '{tensor_name}': {message}")
        self.tensor_name = tensor_name


class CheckpointConfigMismatchError(CheckpointError):
    def __init__(self, field: str, checkpoint_value, config_value) -> None:
        super().__init__(
            f"config mismatch for 'model.{field}': checkpoint has {checkpoint_value!r}, config asks for {config_value!r}"
        )
        self.field = field


class NonFiniteLossError(RuntimeError):
    def __init__(self, message: str, seq_id: Optional[str] = None) -> None:
        if seq_id is not None:
            message = f"{message} (sequence '{seq_id}')"
        super().__init__(message)
        self.seq_id = seq_id


class InvalidTargetError(ValueError):
    pass
