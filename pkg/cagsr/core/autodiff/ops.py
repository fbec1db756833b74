# === FILE: cagsr/core/autodiff/ops.py ===
"""
Differentiable operations.

Each op computes its forward result with numpy and, when a tape is active and
any input requires gradients, records a backward rule mapping the output
gradient to one gradient per input (None for inputs that need none).
"""

from __future__ import annotations

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from cagsr.core.autodiff.tensor import BackwardRule, Tensor, active_tape
from cagsr.exceptions import ContractError, InputError, ShapeError

Operand = Union[Tensor, float, int, np.ndarray]


def _as_tensor(value: Operand, like: Optional[Tensor] = None) -> Tensor:
    if isinstance(value, Tensor):
        return value
    dtype = like.dtype if like is not None else None
    return Tensor(np.asarray(value, dtype=dtype), requires_grad=False)


def _emit(data: np.ndarray, inputs: Sequence[Tensor], rule: BackwardRule, op: str) -> Tensor:
    out = Tensor(data, requires_grad=False)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.record(out, inputs, rule, op)
    return out


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum out the axes numpy broadcasting added or stretched."""
    if grad.shape == shape:
        return grad
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


# -------------------------
# Elementwise arithmetic
# -------------------------

def add(a: Operand, b: Operand) -> Tensor:
    a_t = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b_t = _as_tensor(b, a_t)
    out = a_t.data + b_t.data

    def rule(g: np.ndarray):
        return _unbroadcast(g, a_t.shape), _unbroadcast(g, b_t.shape)

    return _emit(out, (a_t, b_t), rule, "add")


def sub(a: Operand, b: Operand) -> Tensor:
    a_t = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b_t = _as_tensor(b, a_t)
    out = a_t.data - b_t.data

    def rule(g: np.ndarray):
        return _unbroadcast(g, a_t.shape), _unbroadcast(-g, b_t.shape)

    return _emit(out, (a_t, b_t), rule, "sub")


def mul(a: Operand, b: Operand) -> Tensor:
    a_t = _as_tensor(a, b if isinstance(b, Tensor) else None)
    b_t = _as_tensor(b, a_t)
    out = a_t.data * b_t.data

    def rule(g: np.ndarray):
        return _unbroadcast(g * b_t.data, a_t.shape), _unbroadcast(g * a_t.data, b_t.shape)

    return _emit(out, (a_t, b_t), rule, "mul")


def neg(a: Tensor) -> Tensor:
    return _emit(-a.data, (a,), lambda g: (-g,), "neg")


def exp(a: Tensor) -> Tensor:
    out = np.exp(a.data)
    return _emit(out, (a,), lambda g: (g * out,), "exp")


def relu(a: Tensor) -> Tensor:
    mask = a.data > 0
    return _emit(a.data * mask, (a,), lambda g: (g * mask,), "relu")


def clip(a: Tensor, low: float, high: float) -> Tensor:
    """Clamp into [low, high]; the gradient is zero where clamping is active."""
    inside = (a.data >= low) & (a.data <= high)
    out = np.clip(a.data, low, high)
    return _emit(out, (a,), lambda g: (g * inside,), "clip")


def minimum(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise min; ties send the gradient to `a`."""
    if a.shape != b.shape:
        raise ShapeError(f"minimum needs equal shapes, got {a.shape} and {b.shape}")
    pick_a = a.data <= b.data
    out = np.where(pick_a, a.data, b.data)

    def rule(g: np.ndarray):
        return g * pick_a, g * ~pick_a

    return _emit(out, (a, b), rule, "minimum")


# -------------------------
# Linear algebra and shapes
# -------------------------

def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Matrix product over the last two axes (leading axes broadcast)."""
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise ShapeError(f"matmul dimension mismatch: {a.shape} @ {b.shape}")
    out = np.matmul(a.data, b.data)

    def rule(g: np.ndarray):
        ga = np.matmul(g, np.swapaxes(b.data, -1, -2))
        gb = np.matmul(np.swapaxes(a.data, -1, -2), g)
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return _emit(out, (a, b), rule, "matmul")


def reshape(a: Tensor, shape: Tuple[int, ...]) -> Tensor:
    try:
        out = a.data.reshape(shape)
    except ValueError as exc:
        raise ShapeError(f"cannot reshape {a.shape} into {shape}") from exc
    return _emit(out, (a,), lambda g: (g.reshape(a.shape),), "reshape")


def transpose(a: Tensor, axes: Optional[Tuple[int, ...]] = None) -> Tensor:
    axes = tuple(reversed(range(a.ndim))) if axes is None else tuple(axes)
    inverse = tuple(np.argsort(axes))
    return _emit(np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),), "transpose")


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise ContractError("concat needs at least one tensor")
    out = np.concatenate([t.data for t in tensors], axis=axis)
    bounds = np.cumsum([t.shape[axis] for t in tensors])[:-1]

    def rule(g: np.ndarray):
        return tuple(np.split(g, bounds, axis=axis))

    return _emit(out, tuple(tensors), rule, "concat")


def slice_rows(a: Tensor, start: int, stop: int) -> Tensor:
    out = a.data[start:stop]

    def rule(g: np.ndarray):
        full = np.zeros_like(a.data)
        full[start:stop] = g
        return (full,)

    return _emit(out, (a,), rule, "slice_rows")


# -------------------------
# Reductions
# -------------------------

def sum(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    out = np.sum(a.data, axis=axis, keepdims=keepdims)

    def rule(g: np.ndarray):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape),)

    return _emit(np.asarray(out), (a,), rule, "sum")


def mean(a: Tensor, axis: Optional[int] = None, keepdims: bool = False) -> Tensor:
    count = a.size if axis is None else a.shape[axis]
    return mul(sum(a, axis=axis, keepdims=keepdims), 1.0 / count)


# -------------------------
# Normalisation and distributions
# -------------------------

def softmax(v: Tensor, axis: int = -1) -> Tensor:
    shifted = v.data - np.max(v.data, axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / np.sum(e, axis=axis, keepdims=True)

    def rule(g: np.ndarray):
        return (out * (g - np.sum(g * out, axis=axis, keepdims=True)),)

    return _emit(out, (v,), rule, "softmax")


def log_softmax(v: Tensor, axis: int = -1) -> Tensor:
    shifted = v.data - np.max(v.data, axis=axis, keepdims=True)
    out = shifted - np.log(np.sum(np.exp(shifted), axis=axis, keepdims=True))

    def rule(g: np.ndarray):
        return (g - np.exp(out) * np.sum(g, axis=axis, keepdims=True),)

    return _emit(out, (v,), rule, "log_softmax")


def layer_norm(x: Tensor, gain: Tensor, bias: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalise over the last axis, then scale and shift."""
    mu = x.data.mean(axis=-1, keepdims=True)
    centred = x.data - mu
    var = (centred ** 2).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    x_hat = centred * inv_std
    out = x_hat * gain.data + bias.data
    n = x.shape[-1]

    def rule(g: np.ndarray):
        g_hat = g * gain.data
        gx = inv_std / n * (
            n * g_hat
            - g_hat.sum(axis=-1, keepdims=True)
            - x_hat * (g_hat * x_hat).sum(axis=-1, keepdims=True)
        )
        g_gain = _unbroadcast(g * x_hat, gain.shape)
        g_bias = _unbroadcast(g, bias.shape)
        return gx, g_gain, g_bias

    return _emit(out, (x, gain, bias), rule, "layer_norm")


# -------------------------
# Indexing
# -------------------------

def embedding(weight: Tensor, ids: Sequence[int]) -> Tensor:
    """Gather rows of `weight`; repeated ids accumulate their gradients."""
    idx = np.asarray(ids, dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= weight.shape[0]):
        raise InputError(f"token id out of range for table of {weight.shape[0]} rows")
    out = weight.data[idx]

    def rule(g: np.ndarray):
        full = np.zeros_like(weight.data)
        np.add.at(full, idx, g)
        return (full,)

    return _emit(out, (weight,), rule, "embedding")


def take_along(a: Tensor, ids: Sequence[int]) -> Tensor:
    """For a (T, V) tensor pick a[t, ids[t]] for every row, giving shape (T,)."""
    idx = np.asarray(ids, dtype=np.int64)
    if a.ndim != 2 or idx.shape != (a.shape[0],):
        raise ShapeError(f"take_along needs (T, V) and (T,), got {a.shape} and {idx.shape}")
    if idx.size and (idx.min() < 0 or idx.max() >= a.shape[1]):
        raise InputError(f"index out of range for {a.shape[1]} columns")
    rows = np.arange(a.shape[0])
    out = a.data[rows, idx]

    def rule(g: np.ndarray):
        full = np.zeros_like(a.data)
        full[rows, idx] = g
        return (full,)

    return _emit(out, (a,), rule, "take_along")


def token_log_probs(logits: Tensor, targets: Sequence[int]) -> Tensor:
    """Per-position log-probability of each target token."""
    return take_along(log_softmax(logits, axis=-1), targets)


def cross_entropy(logits: Tensor, targets: Sequence[int], ignore_index: Optional[int] = None) -> Tensor:
    """Mean token-level negative log-likelihood, skipping `ignore_index` targets."""
    tgt = np.asarray(targets, dtype=np.int64)
    keep = np.ones_like(tgt, dtype=bool) if ignore_index is None else tgt != ignore_index
    if not keep.any():
        raise ContractError("cross_entropy has no targets left after ignore_index")
    safe = np.where(keep, tgt, 0)
    picked = token_log_probs(logits, safe)
    weights = keep.astype(logits.dtype) / keep.sum()
    return neg(sum(mul(picked, weights)))
