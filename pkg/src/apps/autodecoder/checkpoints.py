"""The ADWT weight checkpoint and its JSON sidecar."""

import json
import struct
from pathlib import Path

import numpy as np
import torch
from django.core.exceptions import ValidationError

from src.apps.common.artifacts import atomic_write_bytes, atomic_write_json, config_trailer, read_config_trailer
from src.apps.scene.constants import ErrorMessages as FormatMessages

from .constants import CheckpointFormat, ErrorMessages
from .network import FieldDecoder


_HEADER = struct.Struct("<4sI5I")


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.name + ".json")


def encode_checkpoint(decoder, digest=None):
    """
    Header (magic, version, latent, condition and hidden sizes, layer
    count, skip layer), then every layer's weight matrix and bias as
    little-endian f32, then the optional config trailer.
    """
    arch = decoder.architecture()
    header = _HEADER.pack(
        CheckpointFormat.MAGIC,
        CheckpointFormat.VERSION,
        arch["latent_size"],
        arch["condition_size"],
        arch["hidden_size"],
        arch["layers"],
        arch["skip_layer"],
    )
    body = b"".join(
        tensor.detach().cpu().numpy().astype("<f4").tobytes()
        for layer in decoder.layers
        for tensor in (layer.weight, layer.bias)
    )
    return header + body + config_trailer(digest)


def decode_checkpoint(data):
    """
    Inverse of ``encode_checkpoint``: returns ``(decoder, digest)``.
    """
    if len(data) < _HEADER.size:
        raise ValidationError(FormatMessages.TRUNCATED.format(format="ADWT"))
    magic, version, latent, condition, hidden, layers, skip = _HEADER.unpack_from(data)
    if magic != CheckpointFormat.MAGIC:
        raise ValidationError(FormatMessages.BAD_MAGIC.format(format="ADWT"))
    if version != CheckpointFormat.VERSION:
        raise ValidationError(FormatMessages.UNSUPPORTED_VERSION.format(format="ADWT", version=version))
    decoder = FieldDecoder(latent, condition, hidden, layers, skip)

    offset = _HEADER.size
    state = {}
    for index, layer in enumerate(decoder.layers):
        for name in ("weight", "bias"):
            shape = tuple(getattr(layer, name).shape)
            count = int(np.prod(shape))
            if len(data) < offset + 4 * count:
                raise ValidationError(FormatMessages.TRUNCATED.format(format="ADWT"))
            values = np.frombuffer(data, dtype="<f4", count=count, offset=offset).reshape(shape)
            state[f"layers.{index}.{name}"] = torch.from_numpy(values.astype(np.float32))
            offset += 4 * count
    try:
        decoder.load_state_dict(state)
    except RuntimeError as error:
        raise ValidationError(ErrorMessages.CHECKPOINT_SHAPES) from error
    decoder.eval()
    return decoder, read_config_trailer(data, offset)


def write_checkpoint(path, result, run_config=None):
    """
    Write the decoder of a ``TrainingResult`` as ADWT and its latents and
    loss history next to it.
    """
    digest = run_config.digest if run_config is not None else None
    atomic_write_bytes(path, encode_checkpoint(result.decoder, digest))
    sidecar = {
        "architecture": result.decoder.architecture(),
        "latents": {key: np.asarray(value).tolist() for key, value in result.latents.items()},
        "history": result.history,
    }
    if run_config is not None:
        sidecar["run_config"] = run_config.to_dict()
    atomic_write_json(sidecar_path(path), sidecar)
    return Path(path)


def read_checkpoint(path):
    decoder, digest = decode_checkpoint(Path(path).read_bytes())
    return decoder, digest


def read_latents(path):
    """
    Latent codes stored next to a checkpoint, empty when the sidecar is
    missing.
    """
    sidecar = sidecar_path(path)
    if not sidecar.exists():
        return {}
    data = json.loads(sidecar.read_text())
    return {key: np.asarray(value, dtype=float) for key, value in data.get("latents", {}).items()}
