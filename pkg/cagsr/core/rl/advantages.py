# === FILE: cagsr/core/rl/advantages.py ===
import numpy as np

from cagsr.core.entities.rollout import RolloutBatch

STD_GUARD = 1e-8


def compute_advantages(batch: RolloutBatch, normalize: bool = True) -> RolloutBatch:
    """A = R - V_old per candidate, optionally standardised across the batch
    (population stdev). Updates the entries in place and returns the batch."""
    if not batch.entries:
        return batch
    adv = batch.rewards - batch.values
    if normalize:
        adv = (adv - adv.mean()) / (adv.std() + STD_GUARD)
    for entry, a in zip(batch.entries, adv):
        entry.advantage = float(a)
    return batch
