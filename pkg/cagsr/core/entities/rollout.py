# === FILE: cagsr/core/entities/rollout.py ===
from dataclasses import dataclass, field
from typing import List

import numpy as np

from cagsr.core.entities.candidate import Candidate
from cagsr.core.entities.reward import RewardBreakdown


@dataclass
class RolloutEntry:
    prompt_index: int
    prompt_ids: List[int]
    candidate: Candidate
    reward: RewardBreakdown
    value_old: float
    advantage: float = 0.0
    relevance: float = 0.0

    @property
    def token_advantages(self) -> np.ndarray:
        # the sequence-level advantage is credited to every token
        return np.full(len(self.candidate.token_ids), self.advantage)


@dataclass
class RolloutBatch:
    iteration: int
    entries: List[RolloutEntry] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def rewards(self) -> np.ndarray:
        return np.array([e.reward.total for e in self.entries], dtype=np.float64)

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value_old for e in self.entries], dtype=np.float64)

    @property
    def advantages(self) -> np.ndarray:
        return np.array([e.advantage for e in self.entries], dtype=np.float64)
