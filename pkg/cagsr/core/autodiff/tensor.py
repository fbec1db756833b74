# === FILE: cagsr/core/autodiff/tensor.py ===
"""
Dense tensors and the define-by-run tape.

A `Tape` is activated with a `with` block. While it is active, every op whose
inputs require gradients appends a node to it; outside a tape ops record
nothing and their outputs never require gradients (inference mode).

The active tape lives in a `ContextVar`, so each thread (and each asyncio task)
sees its own tape.
"""

from __future__ import annotations

from contextlib import contextmanager
from contextvars import ContextVar, Token
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from cagsr.exceptions import ContractError

ArrayLike = Union[np.ndarray, float, int, Sequence[float], Sequence[Sequence[float]]]
BackwardRule = Callable[[np.ndarray], Tuple[Optional[np.ndarray], ...]]

_ACTIVE_TAPE: ContextVar[Optional["Tape"]] = ContextVar("cagsr_active_tape", default=None)


class Tensor:
    """A numpy array plus gradient bookkeeping."""

    __slots__ = ("data", "requires_grad", "grad", "name")

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        name: Optional[str] = None,
        dtype: Optional[np.dtype] = None,
    ):
        arr = np.asarray(data, dtype=dtype if dtype is not None else None)
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.float32)
        self.data: np.ndarray = arr
        self.requires_grad = requires_grad
        # leaf parameters start with zero grads so unused ones read as zeros
        self.grad: Optional[np.ndarray] = np.zeros_like(arr) if requires_grad else None
        self.name = name

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single-element tensor, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def zero_grad(self) -> None:
        if self.requires_grad:
            self.grad = np.zeros_like(self.data)

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype}, requires_grad={self.requires_grad}{label})"

    # operator sugar; implementations live in ops.py
    def __add__(self, other):
        return _ops.add(self, other)

    def __radd__(self, other):
        return _ops.add(other, self)

    def __sub__(self, other):
        return _ops.sub(self, other)

    def __rsub__(self, other):
        return _ops.sub(other, self)

    def __mul__(self, other):
        return _ops.mul(self, other)

    def __rmul__(self, other):
        return _ops.mul(other, self)

    def __neg__(self):
        return _ops.neg(self)

    def __matmul__(self, other):
        return _ops.matmul(self, other)


@dataclass
class Node:
    """One recorded operation: inputs, output and the rule mapping d(out) to d(inputs)."""
    inputs: Tuple[Tensor, ...]
    output: Tensor
    backward_rule: BackwardRule
    op: str


@dataclass
class Tape:
    """Ordered record of operations for one forward pass."""
    nodes: List[Node] = field(default_factory=list)
    consumed: bool = False
    _outputs: Dict[int, int] = field(default_factory=dict)
    _token: Optional[Token] = None

    def __enter__(self) -> "Tape":
        if self.consumed:
            raise ContractError("cannot re-activate a tape that already ran backward")
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, *exc_info) -> None:
        if self._token is not None:
            _ACTIVE_TAPE.reset(self._token)
            self._token = None

    def record(self, output: Tensor, inputs: Sequence[Tensor], rule: BackwardRule, op: str) -> None:
        self._outputs[id(output)] = len(self.nodes)
        self.nodes.append(Node(inputs=tuple(inputs), output=output, backward_rule=rule, op=op))

    def contains(self, tensor: Tensor) -> bool:
        return id(tensor) in self._outputs

    def backward(self, loss: Tensor) -> None:
        backward(self, loss)


def active_tape() -> Optional[Tape]:
    return _ACTIVE_TAPE.get()


@contextmanager
def no_grad() -> Iterator[None]:
    """Suspend recording for the enclosed block, even inside an active tape."""
    token = _ACTIVE_TAPE.set(None)
    try:
        yield
    finally:
        _ACTIVE_TAPE.reset(token)


def backward(tape: Tape, loss: Tensor) -> None:
    """Populate `.grad` of every leaf reachable from `loss`.

    Leaf grads accumulate additively. A tape can only be walked once.
    """
    if loss.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.shape}")
    if tape.consumed:
        raise ContractError("tape already consumed; run the forward pass again")
    if not tape.contains(loss):
        raise ContractError("loss was not recorded on this tape")

    tape.consumed = True
    grads: Dict[int, np.ndarray] = {id(loss): np.ones_like(loss.data)}
    produced = tape._outputs

    for node in reversed(tape.nodes):
        g_out = grads.pop(id(node.output), None)
        if g_out is None:
            continue
        in_grads = node.backward_rule(g_out)
        for inp, g in zip(node.inputs, in_grads):
            if g is None or not inp.requires_grad:
                continue
            g = np.asarray(g, dtype=inp.data.dtype).reshape(inp.shape)
            if id(inp) in produced:
                key = id(inp)
                grads[key] = grads[key] + g if key in grads else g
            else:
                inp.grad = g.copy() if inp.grad is None else inp.grad + g


from cagsr.core.autodiff import ops as _ops  # noqa: E402  (ops imports Tensor from this module)
