# === FILE: cagsr/core/interfaces/scorer_interface.py ===
from abc import ABC, abstractmethod
from typing import Sequence

from cagsr.core.entities.candidate import Candidate
from cagsr.core.entities.reward import RewardBreakdown


class RewardScorer(ABC):
    @abstractmethod
    def score(self, prompt_ids: Sequence[int], candidate: Candidate) -> RewardBreakdown:
        """Score one sampled candidate for its prompt. Must be a pure function of its inputs."""
        raise NotImplementedError

    def relevance(self, prompt_ids: Sequence[int], candidate: Candidate) -> float:
        """Lexical relevance of the candidate; scorers without a notion of salience report 0."""
        return 0.0
