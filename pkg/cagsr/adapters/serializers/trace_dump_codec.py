# === FILE: cagsr/adapters/serializers/trace_dump_codec.py ===
"""
Attention-trace dumps as a numpy .npz container.

`header` holds a JSON document {format_version, layer_indices, n_candidates};
candidate i is stored as `c{i}.prompt`, `c{i}.response` and `c{i}.rows`, the
latter a (|y| * trace_layers, |x|) matrix ordered step-major, then layer.
"""
import io
import json
from typing import Dict, List, Sequence

import numpy as np
from loguru import logger

from cagsr.core.entities.attention_trace import AttentionTrace, TraceDumpEntry
from cagsr.exceptions import ContractError, SerializationError

FORMAT_VERSION = 1


def encode_trace_dump(entries: Sequence[TraceDumpEntry]) -> bytes:
    layer_indices = list(entries[0].trace.layer_indices) if entries else []
    arrays: Dict[str, np.ndarray] = {}
    for i, entry in enumerate(entries):
        if list(entry.trace.layer_indices) != layer_indices:
            raise SerializationError("all traces in one dump must cover the same layers")
        arrays[f"c{i}.prompt"] = np.asarray(entry.prompt_ids, dtype=np.int64)
        arrays[f"c{i}.response"] = np.asarray(entry.token_ids, dtype=np.int64)
        arrays[f"c{i}.rows"] = entry.trace.flat_rows().astype(np.float64)
    header = {"format_version": FORMAT_VERSION, "layer_indices": layer_indices, "n_candidates": len(entries)}
    buf = io.BytesIO()
    np.savez(buf, header=np.array(json.dumps(header)), **arrays)
    return buf.getvalue()


def decode_trace_dump(blob: bytes) -> List[TraceDumpEntry]:
    try:
        with np.load(io.BytesIO(blob), allow_pickle=False) as npz:
            header = json.loads(str(npz["header"]))
            if header.get("format_version") != FORMAT_VERSION:
                raise SerializationError(f"unsupported trace dump version {header.get('format_version')}")
            layers = tuple(header["layer_indices"])
            entries = []
            for i in range(header["n_candidates"]):
                prompt = npz[f"c{i}.prompt"].tolist()
                trace = AttentionTrace.from_flat(npz[f"c{i}.rows"], len(prompt), layers)
                entries.append(TraceDumpEntry(prompt, npz[f"c{i}.response"].tolist(), trace))
    except SerializationError:
        raise
    except (KeyError, ValueError, OSError, ContractError) as exc:
        logger.exception("Failed to decode trace dump")
        raise SerializationError(str(exc)) from exc
    return entries
