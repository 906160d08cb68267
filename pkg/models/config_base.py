from __future__ import annotations

from dataclasses import fields
from enum import Enum
from typing import Any, Dict, Type, TypeVar

from exceptions import ConfigurationError

C = TypeVar("C", bound="ConfigMixin")


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    return value


class ConfigMixin:
    """dict round trip for the frozen config dataclasses; None-valued fields are dropped (TOML has no null)."""

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: _plain(getattr(self, f.name)) for f in fields(self) if getattr(self, f.name) is not None}

    @classmethod
    def from_dict(cls: Type[C], data: Dict[str, Any] | None) -> C:
        data = dict(data or {})
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigurationError(unknown[0], f"unknown key for {cls.__name__}")
        return cls(**data)

    def _set(self, name: str, value: Any) -> None:
        object.__setattr__(self, name, value)

    def _coerce_enum(self, name: str, enum_type: Type[Enum]) -> None:
        value = getattr(self, name)
        try:
            self._set(name, enum_type(value))
        except ValueError:
            choices = ", ".join(e.value for e in enum_type)
            raise ConfigurationError(name, f"{value!r} is not one of {choices}") from None

    def _coerce_tuple(self, name: str, item_type=int) -> None:
        value = getattr(self, name)
        if value is not None:
            self._set(name, tuple(item_type(v) for v in value))
