# === FILE: cagsr/core/rl/loop.py ===
"""
The outer training loop: collect, score, compute advantages, update.

Prompts for iteration `t` are drawn with a generator seeded by (seed, t), so a
run resumed at iteration `t` sees exactly the batches an uninterrupted run
would have seen.
"""
from typing import Awaitable, Callable, List, Optional, Sequence

import numpy as np
from loguru import logger

from cagsr.core.autodiff.optim import AdamState
from cagsr.core.interfaces.scorer_interface import RewardScorer
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import SamplingConfig, TrainConfig
from cagsr.core.models.schemas import IterationMetrics
from cagsr.core.rl.advantages import compute_advantages
from cagsr.core.rl.guards import check_reward_hacking
from cagsr.core.rl.rollouts import collect_rollouts
from cagsr.core.rl.trainer import train_iteration
from cagsr.exceptions import InputError

IterationCallback = Callable[[IterationMetrics], Awaitable[None]]


def optimizer_for(cfg: TrainConfig) -> AdamState:
    return AdamState(lr=cfg.lr, beta1=cfg.beta1, beta2=cfg.beta2, eps_num=cfg.adam_eps)


def prompts_for_iteration(prompts: Sequence[Sequence[int]], cfg: TrainConfig, iteration: int) -> List[Sequence[int]]:
    rng = np.random.default_rng([cfg.seed, iteration])
    replace = len(prompts) < cfg.batch_prompts
    picks = rng.choice(len(prompts), size=cfg.batch_prompts, replace=replace)
    return [prompts[int(i)] for i in picks]


async def train(
    model: PolicyModel,
    prompts: Sequence[Sequence[int]],
    scorer: RewardScorer,
    cfg: TrainConfig,
    sampling: SamplingConfig,
    state: Optional[AdamState] = None,
    start_iteration: int = 0,
    entropy_floor: float = 0.0,
    previous: Optional[IterationMetrics] = None,
    on_iteration: Optional[IterationCallback] = None,
) -> List[IterationMetrics]:
    """Run iterations `start_iteration .. total_iterations - 1` and return their metrics.

    `previous` is the last metrics record before `start_iteration` (when resuming)
    so the reward-hacking guard can compare across the restart.
    """
    if not prompts:
        raise InputError("train needs at least one prompt")
    state = state if state is not None else optimizer_for(cfg)
    history: List[IterationMetrics] = []

    for iteration in range(start_iteration, cfg.total_iterations):
        batch = await collect_rollouts(
            model,
            prompts_for_iteration(prompts, cfg, iteration),
            scorer,
            sampling,
            cfg.candidates_per_prompt,
            iteration=iteration,
            workers=cfg.rollout_workers,
        )
        compute_advantages(batch, normalize=cfg.reward_normalize)
        metrics = train_iteration(model, batch, cfg, state)
        if check_reward_hacking(previous, metrics, entropy_floor):
            logger.warning(
                "reward-hacking guard tripped at iteration {}: entropy={:.4f} relevance={:.4f}",
                iteration,
                metrics.mean_entropy,
                metrics.mean_relevance,
            )
            metrics.tripwire = True
        logger.info(
            "iteration={} mean_reward={:.4f} coverage={:.4f} entropy={:.4f} clip={:.3f}",
            iteration,
            metrics.mean_reward,
            metrics.mean_coverage,
            metrics.mean_entropy,
            metrics.clip_fraction,
        )
        history.append(metrics)
        previous = metrics
        if on_iteration is not None:
            await on_iteration(metrics)
    return history


def held_out_reward(
    model: PolicyModel, prompts: Sequence[Sequence[int]], scorer: RewardScorer, sampling: SamplingConfig
) -> float:
    """Mean reward of one greedy response per held-out prompt."""
    greedy = sampling.model_copy(update={"temperature": 0.0})
    totals = [scorer.score(p, model.generate(p, greedy, 1)[0]).total for p in prompts]
    return float(np.mean(totals)) if totals else 0.0
