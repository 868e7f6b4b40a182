"""Resolved parameter sets embedded in every emitted artifact."""

from dataclasses import dataclass, field
from pathlib import PurePath

from src.apps.common.artifacts import config_hash


def _plain(value):
    if isinstance(value, PurePath):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, dict):
        return {str(key): _plain(item) for key, item in value.items()}
    if hasattr(value, "item"):
        return value.item()
    return value


@dataclass(frozen=True)
class RunConfig:
    """
    The parameters one subcommand ran with. ``digest`` is the SHA-256 of
    the canonical JSON of ``command`` and ``params``.
    """
    command: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", _plain(dict(self.params)))

    @property
    def digest(self):
        return config_hash({"command": self.command, "params": self.params})

    def to_dict(self):
        return {"command": self.command, "params": self.params, "hash": self.digest}

    @classmethod
    def from_dict(cls, data):
        return cls(data["command"], data.get("params", {}))
