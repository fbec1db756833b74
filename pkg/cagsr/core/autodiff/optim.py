# === FILE: cagsr/core/autodiff/optim.py ===
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping

import numpy as np

from cagsr.core.autodiff.tensor import Tensor
from cagsr.exceptions import ContractError


@dataclass
class AdamState:
    """Adam moments keyed by parameter name."""
    lr: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps_num: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def copy(self) -> "AdamState":
        return AdamState(
            lr=self.lr,
            beta1=self.beta1,
            beta2=self.beta2,
            eps_num=self.eps_num,
            step=self.step,
            m={k: a.copy() for k, a in self.m.items()},
            v={k: a.copy() for k, a in self.v.items()},
        )


def adam_step(params: Mapping[str, Tensor], state: AdamState) -> None:
    """Apply one bias-corrected Adam update in place, then zero every grad."""
    for name, p in params.items():
        if p.grad is None:
            raise ContractError(f"parameter {name!r} has no gradient")

    state.step += 1
    t = state.step
    c1 = 1.0 - state.beta1 ** t
    c2 = 1.0 - state.beta2 ** t

    for name, p in params.items():
        g = p.grad
        m = state.m.get(name)
        v = state.v.get(name)
        if m is None or v is None:
            m = np.zeros_like(p.data)
            v = np.zeros_like(p.data)
        m = state.beta1 * m + (1.0 - state.beta1) * g
        v = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        state.m[name], state.v[name] = m, v
        update = state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps_num)
        p.data = (p.data - update).astype(p.data.dtype, copy=False)
        p.grad = np.zeros_like(p.data)
