# === FILE: cagsr/core/rl/losses.py ===
"""Policy and value objectives, written as losses to minimise."""
from dataclasses import dataclass

import numpy as np

from cagsr.core.autodiff import ops
from cagsr.core.autodiff.tensor import Tensor
from cagsr.exceptions import DivergenceError, ShapeError


@dataclass
class PolicyLoss:
    loss: Tensor
    clip_fraction: float


def _check_aligned(logp_new: Tensor, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if arr.shape != logp_new.shape:
            raise ShapeError(f"per-token arrays misaligned: {logp_new.shape} vs {arr.shape}")


def ppo_loss(logp_new: Tensor, logp_old: np.ndarray, advantages: np.ndarray, epsilon: float) -> PolicyLoss:
    """-mean_t min(r_t A_t, clip(r_t, 1-eps, 1+eps) A_t) with r_t = exp(logp_new - logp_old).

    Gradients flow through `logp_new` only.
    """
    logp_old = np.asarray(logp_old, dtype=logp_new.dtype)
    advantages = np.asarray(advantages, dtype=logp_new.dtype)
    _check_aligned(logp_new, logp_old, advantages)

    ratio = ops.exp(ops.sub(logp_new, logp_old))
    if not np.all(np.isfinite(ratio.data)):
        raise DivergenceError("probability ratio became non-finite")
    unclipped = ops.mul(ratio, advantages)
    clipped = ops.mul(ops.clip(ratio, 1.0 - epsilon, 1.0 + epsilon), advantages)
    objective = ops.minimum(unclipped, clipped)
    clip_fraction = float(np.mean(clipped.data < unclipped.data))
    return PolicyLoss(loss=ops.neg(ops.mean(objective)), clip_fraction=clip_fraction)


def reinforce_loss(logp_new: Tensor, advantages: np.ndarray) -> PolicyLoss:
    """REINFORCE with a baseline: -mean_t logp_t A_t."""
    advantages = np.asarray(advantages, dtype=logp_new.dtype)
    _check_aligned(logp_new, advantages)
    return PolicyLoss(loss=ops.neg(ops.mean(ops.mul(logp_new, advantages))), clip_fraction=0.0)


def value_loss(values_new: Tensor, rewards: np.ndarray) -> Tensor:
    """Mean squared error between V(x) and the observed rewards."""
    rewards = np.asarray(rewards, dtype=values_new.dtype)
    _check_aligned(values_new, rewards)
    residual = ops.sub(values_new, rewards)
    return ops.mean(ops.mul(residual, residual))
