# === FILE: cagsr/core/rl/trainer.py ===
"""One policy-optimisation step over a collected rollout batch."""
import math
from typing import Dict, List

import numpy as np
from loguru import logger

from cagsr.core.autodiff import ops
from cagsr.core.autodiff.optim import AdamState, adam_step
from cagsr.core.autodiff.tensor import Tape, Tensor
from cagsr.core.entities.rollout import RolloutBatch, RolloutEntry
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import TrainConfig
from cagsr.core.models.schemas import Algorithm, IterationMetrics
from cagsr.core.rl.losses import PolicyLoss, ppo_loss, reinforce_loss, value_loss
from cagsr.exceptions import ContractError, DivergenceError


def batch_statistics(batch: RolloutBatch) -> Dict[str, float]:
    """Reward-side means of a batch; entropy is averaged over nonempty candidates only."""
    rewards = batch.rewards
    scored = [e for e in batch.entries if not e.reward.empty]
    return {
        "n_entries": len(batch),
        "n_empty": len(batch) - len(scored),
        "mean_reward": float(rewards.mean()),
        "min_reward": float(rewards.min()),
        "max_reward": float(rewards.max()),
        "mean_coverage": float(np.mean([e.reward.coverage for e in batch.entries])),
        "mean_entropy": float(np.mean([e.reward.mean_entropy for e in scored])) if scored else 0.0,
        "mean_repeat_penalty": float(np.mean([e.reward.repeat_penalty for e in batch.entries])),
        "mean_relevance": float(np.mean([e.relevance for e in batch.entries])),
        "mean_advantage": float(batch.advantages.mean()),
    }


def _minibatch_loss(
    model: PolicyModel, entries: List[RolloutEntry], cfg: TrainConfig
) -> tuple[Tensor, PolicyLoss, Tensor]:
    logps: List[Tensor] = []
    values: List[Tensor] = []
    for entry in entries:
        logp, value = model.log_prob_and_value(entry.prompt_ids, entry.candidate.token_ids)
        logps.append(logp)
        values.append(ops.reshape(value, (1,)))
    logp_new = ops.concat(logps)
    advantages = np.concatenate([e.token_advantages for e in entries])
    if cfg.algorithm is Algorithm.PPO:
        logp_old = np.concatenate([e.candidate.logprob_old for e in entries])
        policy = ppo_loss(logp_new, logp_old, advantages, cfg.ppo_epsilon)
    else:
        policy = reinforce_loss(logp_new, advantages)
    v_loss = value_loss(ops.concat(values), np.array([e.reward.total for e in entries]))
    total = ops.add(policy.loss, ops.mul(v_loss, cfg.value_loss_weight))
    return total, policy, v_loss


def train_iteration(model: PolicyModel, batch: RolloutBatch, cfg: TrainConfig, state: AdamState) -> IterationMetrics:
    """Update `model` in place from a batch whose advantages are already computed.

    PPO runs `ppo_epochs` passes over shuffled minibatches. REINFORCE is on-policy,
    so it takes a single full-batch step. If any loss turns non-finite the
    parameters and optimizer state are restored to their pre-iteration values
    and DivergenceError is raised.
    """
    if not batch.entries:
        raise ContractError("cannot train on an empty rollout batch")

    params = model.parameters()
    params_snapshot = model.state_arrays()
    state_snapshot = state.copy()

    if cfg.algorithm is Algorithm.PPO:
        epochs, size = cfg.ppo_epochs, cfg.resolved_minibatch_size()
    else:
        epochs, size = 1, len(batch)

    clip_fractions: List[float] = []
    policy_losses: List[float] = []
    value_losses: List[float] = []
    try:
        for epoch in range(epochs):
            order = np.random.default_rng([cfg.seed, batch.iteration, epoch]).permutation(len(batch))
            for start in range(0, len(order), size):
                chunk = [batch.entries[i] for i in order[start : start + size]]
                with Tape() as tape:
                    total, policy, v_loss = _minibatch_loss(model, chunk, cfg)
                if not math.isfinite(total.item()):
                    raise DivergenceError(f"loss became {total.item()} at iteration {batch.iteration}")
                tape.backward(total)
                adam_step(params, state)
                clip_fractions.append(policy.clip_fraction)
                policy_losses.append(policy.loss.item())
                value_losses.append(v_loss.item())
    except DivergenceError:
        logger.error("iteration {} diverged; restoring pre-iteration parameters", batch.iteration)
        model.load_state_arrays(params_snapshot)
        state.step, state.m, state.v = state_snapshot.step, state_snapshot.m, state_snapshot.v
        raise

    return IterationMetrics(
        iteration=batch.iteration,
        **batch_statistics(batch),
        clip_fraction=float(np.mean(clip_fractions)),
        value_loss=float(np.mean(value_losses)),
        policy_loss=float(np.mean(policy_losses)),
    )
