# === FILE: cagsr/core/entities/reward.py ===
from dataclasses import dataclass, field
from typing import List, Tuple


@dataclass(frozen=True)
class SalientSet:
    indices: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.indices)


@dataclass
class RewardBreakdown:
    coverage: float
    focus: float
    repeat_penalty: float
    total: float
    entropy_per_step: List[float] = field(default_factory=list)
    empty: bool = False

    @property
    def n_steps(self) -> int:
        return len(self.entropy_per_step)

    @property
    def mean_entropy(self) -> float:
        if not self.entropy_per_step:
            return 0.0
        return sum(self.entropy_per_step) / len(self.entropy_per_step)
