# === FILE: cagsr/core/model/layers.py ===
"""Transformer building blocks written against the autodiff ops."""
from __future__ import annotations

import math
from typing import Mapping, Optional, Tuple

import numpy as np

from cagsr.core.autodiff import ops
from cagsr.core.autodiff.tensor import Tensor
from cagsr.core.models.config import ModelConfig

MASKED = -1e9


def causal_mask(size: int, dtype: np.dtype) -> np.ndarray:
    """Additive mask hiding positions after the query position."""
    return np.triu(np.full((size, size), MASKED, dtype=dtype), k=1)


def linear(x: Tensor, w: Tensor, b: Optional[Tensor] = None) -> Tensor:
    y = ops.matmul(x, w)
    return ops.add(y, b) if b is not None else y


def layer_norm(x: Tensor, p: Mapping[str, Tensor], prefix: str) -> Tensor:
    return ops.layer_norm(x, p[f"{prefix}.g"], p[f"{prefix}.b"])


def feed_forward(x: Tensor, p: Mapping[str, Tensor], prefix: str) -> Tensor:
    h = ops.relu(linear(x, p[f"{prefix}.w1"], p[f"{prefix}.b1"]))
    return linear(h, p[f"{prefix}.w2"], p[f"{prefix}.b2"])


def _split_heads(x: Tensor, n_heads: int, head_dim: int) -> Tensor:
    length = x.shape[0]
    return ops.transpose(ops.reshape(x, (length, n_heads, head_dim)), (1, 0, 2))


def multi_head_attention(
    x_q: Tensor,
    x_kv: Tensor,
    p: Mapping[str, Tensor],
    prefix: str,
    cfg: ModelConfig,
    mask: Optional[np.ndarray] = None,
) -> Tuple[Tensor, Tensor]:
    """Scaled dot-product attention.

    Returns the projected output (Tq, d_model) and the attention
    probabilities (n_heads, Tq, Tk).
    """
    t_q = x_q.shape[0]
    n_heads, head_dim = cfg.n_heads, cfg.head_dim
    q = _split_heads(ops.matmul(x_q, p[f"{prefix}.wq"]), n_heads, head_dim)
    k = _split_heads(ops.matmul(x_kv, p[f"{prefix}.wk"]), n_heads, head_dim)
    v = _split_heads(ops.matmul(x_kv, p[f"{prefix}.wv"]), n_heads, head_dim)

    scores = ops.mul(ops.matmul(q, ops.transpose(k, (0, 2, 1))), 1.0 / math.sqrt(head_dim))
    if mask is not None:
        scores = ops.add(scores, mask)
    probs = ops.softmax(scores, axis=-1)

    ctx = ops.matmul(probs, v)
    merged = ops.reshape(ops.transpose(ctx, (1, 0, 2)), (t_q, cfg.d_model))
    return ops.matmul(merged, p[f"{prefix}.wo"]), probs
