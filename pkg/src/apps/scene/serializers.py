"""Scene JSON and the TOAF multi-channel field format."""

import json
import struct
from pathlib import Path

import numpy as np
from django.core.exceptions import ValidationError

from src.apps.common.artifacts import atomic_write_bytes, atomic_write_json, config_trailer, read_config_trailer
from src.apps.planner.trajectory import Trajectory6

from .constants import ErrorMessages
from .grids import GridGeometry, ScalarGrid3
from .solids import Scene


FIELD_MAGIC = b"TOAF"
FIELD_VERSION = 1
_FIELD_HEADER = struct.Struct("<4sI3I3ffI")


def scene_payload(scene, run_config=None, demonstration=None):
    payload = scene.to_dict()
    if demonstration is not None:
        payload["demonstration"] = demonstration.to_dict()
    if run_config is not None:
        payload["run_config"] = run_config.to_dict()
    return payload


def write_scene(path, scene, run_config=None, demonstration=None):
    return atomic_write_json(path, scene_payload(scene, run_config, demonstration))


def read_scene(path):
    data = json.loads(Path(path).read_text())
    return Scene.from_dict(data)


def read_demonstration(path):
    """
    Demonstration stored next to a scene, or ``None`` when absent.
    """
    data = json.loads(Path(path).read_text())
    if "demonstration" not in data:
        return None
    return Trajectory6.from_dict(data["demonstration"])


def encode_fields(channels, digest=None):
    """
    Serialize same-geometry grids as one TOAF payload (little-endian f32,
    x-fastest), followed by the optional config trailer.
    """
    if not channels:
        raise ValidationError("A field file needs at least one channel.")
    geometry = channels[0].geometry
    for channel in channels[1:]:
        if channel.geometry != geometry:
            raise ValidationError("All channels of a field file must share one geometry.")
    header = _FIELD_HEADER.pack(
        FIELD_MAGIC,
        FIELD_VERSION,
        *geometry.dims,
        *geometry.origin,
        geometry.spacing,
        len(channels),
    )
    body = b"".join(channel.flat().astype("<f4").tobytes() for channel in channels)
    return header + body + config_trailer(digest)


def decode_fields(data):
    """
    Inverse of ``encode_fields``: returns ``(channels, digest)``.
    """
    if len(data) < _FIELD_HEADER.size:
        raise ValidationError(ErrorMessages.TRUNCATED.format(format="TOAF"))
    magic, version, nx, ny, nz, ox, oy, oz, spacing, count = _FIELD_HEADER.unpack_from(data)
    if magic != FIELD_MAGIC:
        raise ValidationError(ErrorMessages.BAD_MAGIC.format(format="TOAF"))
    if version != FIELD_VERSION:
        raise ValidationError(ErrorMessages.UNSUPPORTED_VERSION.format(format="TOAF", version=version))
    geometry = GridGeometry((ox, oy, oz), spacing, (nx, ny, nz))
    cells = geometry.size
    payload_size = _FIELD_HEADER.size + 4 * cells * count
    if len(data) < payload_size:
        raise ValidationError(ErrorMessages.TRUNCATED.format(format="TOAF"))
    values = np.frombuffer(data, dtype="<f4", count=cells * count, offset=_FIELD_HEADER.size)
    channels = [
        ScalarGrid3.from_flat(geometry, values[c * cells:(c + 1) * cells].astype(float))
        for c in range(count)
    ]
    return channels, read_config_trailer(data, payload_size)


def write_fields(path, channels, digest=None):
    return atomic_write_bytes(path, encode_fields(channels, digest))


def read_fields(path):
    return decode_fields(Path(path).read_bytes())
