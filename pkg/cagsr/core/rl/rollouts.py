# === FILE: cagsr/core/rl/rollouts.py ===
"""
Rollout collection.

Each prompt is generated and scored in a worker thread; a semaphore bounds how
many prompts are in flight. Every prompt draws from its own generator seeded by
(seed, iteration, prompt index), so the batch does not depend on scheduling.
"""
import asyncio
from typing import List, Optional, Sequence

import numpy as np
from loguru import logger

from cagsr.core.autodiff.tensor import no_grad
from cagsr.core.entities.rollout import RolloutBatch, RolloutEntry
from cagsr.core.interfaces.scorer_interface import RewardScorer
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import SamplingConfig
from cagsr.exceptions import CagsrError, RolloutError

MIN_KEPT_FRACTION = 0.5


def _rollout_prompt(
    model: PolicyModel,
    prompt_index: int,
    prompt_ids: Sequence[int],
    scorer: RewardScorer,
    sampling: SamplingConfig,
    n_candidates: int,
    iteration: int,
) -> List[RolloutEntry]:
    rng = np.random.default_rng([sampling.seed, iteration, prompt_index])
    candidates = model.generate(prompt_ids, sampling, n_candidates, rng)
    with no_grad():
        value_old = model.value_estimate(prompt_ids).item()
    entries = []
    for cand in candidates:
        entries.append(
            RolloutEntry(
                prompt_index=prompt_index,
                prompt_ids=list(prompt_ids),
                candidate=cand,
                reward=scorer.score(prompt_ids, cand),
                value_old=value_old,
                relevance=scorer.relevance(prompt_ids, cand),
            )
        )
    return entries


async def collect_rollouts(
    model: PolicyModel,
    prompts: Sequence[Sequence[int]],
    scorer: RewardScorer,
    sampling: SamplingConfig,
    n_candidates: int,
    iteration: int = 0,
    workers: int = 1,
) -> RolloutBatch:
    """Sample `n_candidates` per prompt with the current (frozen) policy and score them.

    A prompt whose rollout raises is skipped with a warning; if fewer than half
    of the expected entries survive the whole batch fails with RolloutError.
    """
    semaphore = asyncio.Semaphore(workers)

    async def run(index: int, prompt_ids: Sequence[int]) -> Optional[List[RolloutEntry]]:
        async with semaphore:
            try:
                return await asyncio.to_thread(
                    _rollout_prompt, model, index, prompt_ids, scorer, sampling, n_candidates, iteration
                )
            except CagsrError as exc:
                logger.warning("rollout skipped prompt {}: {}", index, exc)
                return None

    results = await asyncio.gather(*(run(i, p) for i, p in enumerate(prompts)))

    batch = RolloutBatch(iteration=iteration)
    for entries in results:
        if entries:
            batch.entries.extend(entries)

    expected = len(prompts) * n_candidates
    if expected and len(batch) < MIN_KEPT_FRACTION * expected:
        raise RolloutError(f"only {len(batch)} of {expected} rollout entries survived at iteration {iteration}")
    logger.debug("iteration {} collected {} rollout entries", iteration, len(batch))
    return batch
