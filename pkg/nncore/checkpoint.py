"""Binary checkpoint container.

Layout::

    b"HMCK" | u32 format version | u32 header length | JSON header | blobs

The JSON header is UTF-8 with sorted keys. Its ``params`` table lists every
parameter in declaration order with name, shape and trainable flag; the
blobs follow in the same order as little-endian float32.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .tensor import DTYPE, Parameter

MAGIC = b"HMCK"
FORMAT_VERSION = 1
BLOB_DTYPE = np.dtype("<f4")
_PREFIX = struct.Struct("<4sII")


class CheckpointError(ValueError):
    """Raised for unreadable or inconsistent checkpoint files."""


@dataclass
class Checkpoint:
    header: dict[str, Any]
    arrays: dict[str, np.ndarray] = field(default_factory=dict)
    trainable: dict[str, bool] = field(default_factory=dict)

    @property
    def model_name(self) -> str:
        return str(self.header["model"])

    @property
    def vocab_hashes(self) -> dict[str, str]:
        return dict(self.header.get("vocab_hashes", {}))


def encode_checkpoint(
    params: Iterable[Parameter],
    header: dict[str, Any],
) -> bytes:
    params = list(params)
    table = [
        {
            "name": param.name,
            "shape": list(param.shape),
            "trainable": param.trainable,
            "buffer": param.buffer,
        }
        for param in params
    ]
    names = [entry["name"] for entry in table]
    if len(set(names)) != len(names):
        raise CheckpointError("parameter names must be unique")
    full_header = {**header, "format_version": FORMAT_VERSION, "params": table}
    header_bytes = json.dumps(
        full_header, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")
    blobs = b"".join(
        np.ascontiguousarray(param.data, dtype=BLOB_DTYPE).tobytes()
        for param in params
    )
    return (
        _PREFIX.pack(MAGIC, FORMAT_VERSION, len(header_bytes))
        + header_bytes
        + blobs
    )


def decode_checkpoint(payload: bytes) -> Checkpoint:
    if len(payload) < _PREFIX.size:
        raise CheckpointError("checkpoint is truncated")
    magic, version, header_length = _PREFIX.unpack_from(payload)
    if magic != MAGIC:
        raise CheckpointError("not a checkpoint file")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    start = _PREFIX.size
    header = json.loads(payload[start : start + header_length])
    offset = start + header_length
    checkpoint = Checkpoint(header=header)
    for entry in header["params"]:
        shape = tuple(entry["shape"])
        count = int(np.prod(shape, dtype=np.int64))
        end = offset + count * BLOB_DTYPE.itemsize
        if end > len(payload):
            raise CheckpointError(f"blob for {entry['name']} is truncated")
        blob = np.frombuffer(payload[offset:end], dtype=BLOB_DTYPE)
        checkpoint.arrays[entry["name"]] = blob.astype(DTYPE).reshape(shape)
        checkpoint.trainable[entry["name"]] = bool(entry["trainable"])
        offset = end
    if offset != len(payload):
        raise CheckpointError("checkpoint has trailing bytes")
    return checkpoint


def save_checkpoint(
    path: Path,
    params: Iterable[Parameter],
    header: dict[str, Any],
) -> str:
    """Write the checkpoint and return the SHA-256 of its bytes."""

    payload = encode_checkpoint(params, header)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(payload)
    return hashlib.sha256(payload).hexdigest()


def load_checkpoint(path: Path) -> Checkpoint:
    return decode_checkpoint(path.read_bytes())


def file_digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def parameter_digest(params: Iterable[Parameter]) -> str:
    """Hash parameter names and exact float64 values."""

    digest = hashlib.sha256()
    for param in params:
        digest.update(param.name.encode("utf-8"))
        digest.update(np.ascontiguousarray(param.data).tobytes())
    return digest.hexdigest()
