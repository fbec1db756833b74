# === FILE: cagsr/core/rl/guards.py ===
from typing import Optional

from cagsr.core.models.schemas import IterationMetrics

RELEVANCE_DROP = 0.10


def check_reward_hacking(
    previous: Optional[IterationMetrics],
    current: IterationMetrics,
    entropy_floor: float,
) -> bool:
    """True when attention collapsed below the entropy floor while relevance
    fell by more than 10% relative to the previous iteration."""
    if previous is None or previous.mean_relevance <= 0.0:
        return False
    if current.mean_entropy >= entropy_floor:
        return False
    drop = (previous.mean_relevance - current.mean_relevance) / previous.mean_relevance
    return drop > RELEVANCE_DROP
