"""Atomic artifact writing and config-hash embedding."""

import hashlib
import json
import os
import tempfile
from pathlib import Path


CONFIG_TRAILER_MAGIC = b"CFGH"
CONFIG_TRAILER_SIZE = len(CONFIG_TRAILER_MAGIC) + 32


def canonical_json(payload):
    """
    Deterministic JSON text: sorted keys, no whitespace variation,
    shortest round-trip float repr.
    """
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=True)


def config_hash(payload):
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def atomic_write_bytes(path, data):
    """
    Write ``data`` to ``path`` through a temporary file in the same
    directory followed by ``os.replace``.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "wb") as stream:
            stream.write(data)
            stream.flush()
            os.fsync(stream.fileno())
        os.replace(temp_name, path)
    except BaseException:
        if os.path.exists(temp_name):
            os.unlink(temp_name)
        raise
    return path


def atomic_write_text(path, text):
    return atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_json(path, payload):
    return atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def config_trailer(digest_hex):
    if digest_hex is None:
        return b""
    return CONFIG_TRAILER_MAGIC + bytes.fromhex(digest_hex)


def read_config_trailer(data, payload_size):
    """
    Return the hex digest stored after a binary payload, or ``None``.
    """
    trailer = data[payload_size:payload_size + CONFIG_TRAILER_SIZE]
    if len(trailer) == CONFIG_TRAILER_SIZE and trailer.startswith(CONFIG_TRAILER_MAGIC):
        return trailer[len(CONFIG_TRAILER_MAGIC):].hex()
    return None
