# === FILE: cagsr/adapters/serializers/checkpoint_codec.py ===
"""
Binary checkpoint format.

    magic (8 bytes) | manifest length (u64, little endian) | manifest (UTF-8 JSON) | arrays

The manifest is {format_version, dtype, model_config, tensors: [{name, shape}], state}.
Arrays follow in manifest order, little-endian, in the manifest dtype. Adam
moments are stored as extra tensors named `adam.m.<param>` and `adam.v.<param>`.
"""
import json
import struct
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
from loguru import logger

from cagsr.core.autodiff.optim import AdamState
from cagsr.core.models.config import ModelConfig
from cagsr.exceptions import SerializationError

MAGIC = b"CAGSRCKP"
FORMAT_VERSION = 1
_LENGTH = struct.Struct("<Q")
_DTYPES = {"float32": "<f4", "float64": "<f8"}
_ADAM_M, _ADAM_V = "adam.m.", "adam.v."


@dataclass
class Checkpoint:
    model_config: ModelConfig
    arrays: Dict[str, np.ndarray]
    adam: Optional[AdamState] = None
    # free-form training state, e.g. {"iteration": 25}
    state: Dict[str, Any] = field(default_factory=dict)


def encode_checkpoint(ckpt: Checkpoint) -> bytes:
    dtype_name = ckpt.model_config.dtype.value
    wire = np.dtype(_DTYPES[dtype_name])
    tensors = dict(ckpt.arrays)
    state = dict(ckpt.state)
    if ckpt.adam is not None:
        adam = ckpt.adam
        state["adam"] = {
            "lr": adam.lr,
            "beta1": adam.beta1,
            "beta2": adam.beta2,
            "eps_num": adam.eps_num,
            "step": adam.step,
        }
        for name in ckpt.arrays:
            if name in adam.m:
                tensors[_ADAM_M + name] = adam.m[name]
                tensors[_ADAM_V + name] = adam.v[name]

    manifest = {
        "format_version": FORMAT_VERSION,
        "dtype": dtype_name,
        "model_config": ckpt.model_config.model_dump(mode="json"),
        "tensors": [{"name": n, "shape": list(np.shape(a))} for n, a in tensors.items()],
        "state": state,
    }
    try:
        header = json.dumps(manifest, sort_keys=True).encode("utf-8")
        body = b"".join(np.ascontiguousarray(a, dtype=wire).tobytes() for a in tensors.values())
    except (TypeError, ValueError) as exc:
        logger.exception("Failed to encode checkpoint")
        raise SerializationError(str(exc)) from exc
    return MAGIC + _LENGTH.pack(len(header)) + header + body


def decode_checkpoint(blob: bytes) -> Checkpoint:
    if blob[: len(MAGIC)] != MAGIC:
        raise SerializationError("not a checkpoint: bad magic bytes")
    try:
        offset = len(MAGIC)
        (length,) = _LENGTH.unpack_from(blob, offset)
        offset += _LENGTH.size
        manifest = json.loads(blob[offset : offset + length].decode("utf-8"))
        offset += length
        if manifest.get("format_version") != FORMAT_VERSION:
            raise SerializationError(f"unsupported checkpoint version {manifest.get('format_version')}")
        wire = np.dtype(_DTYPES[manifest["dtype"]])
        native = np.dtype(manifest["dtype"])
        tensors: Dict[str, np.ndarray] = {}
        for entry in manifest["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape, dtype=np.int64))
            nbytes = count * wire.itemsize
            if offset + nbytes > len(blob):
                raise SerializationError(f"checkpoint truncated inside tensor {entry['name']!r}")
            arr = np.frombuffer(blob, dtype=wire, count=count, offset=offset).reshape(shape)
            tensors[entry["name"]] = arr.astype(native)
            offset += nbytes
        if offset != len(blob):
            raise SerializationError(f"{len(blob) - offset} trailing bytes after the last tensor")
        model_config = ModelConfig.model_validate(manifest["model_config"])
    except SerializationError:
        raise
    except (KeyError, ValueError, struct.error) as exc:
        logger.exception("Failed to decode checkpoint")
        raise SerializationError(str(exc)) from exc

    state = dict(manifest.get("state", {}))
    adam_meta = state.pop("adam", None)
    arrays = {n: a for n, a in tensors.items() if not n.startswith((_ADAM_M, _ADAM_V))}
    adam = None
    if adam_meta is not None:
        adam = AdamState(**adam_meta)
        for name in arrays:
            if _ADAM_M + name in tensors:
                adam.m[name] = tensors[_ADAM_M + name]
                adam.v[name] = tensors[_ADAM_V + name]
    return Checkpoint(model_config=model_config, arrays=arrays, adam=adam, state=state)


def checkpoint_from_model(model, adam: Optional[AdamState] = None, **state: Any) -> Checkpoint:
    return Checkpoint(model_config=model.config, arrays=model.state_arrays(), adam=adam, state=state)
