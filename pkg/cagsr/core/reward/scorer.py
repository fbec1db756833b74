# === FILE: cagsr/core/reward/scorer.py ===
from typing import List, Sequence

import numpy as np

from cagsr.core.entities.attention_trace import TraceDumpEntry
from cagsr.core.entities.candidate import Candidate
from cagsr.core.entities.example import CorpusStats
from cagsr.core.entities.reward import RewardBreakdown
from cagsr.core.eval.metrics import relevance_proxy
from cagsr.core.interfaces.scorer_interface import RewardScorer
from cagsr.core.models.config import RewardConfig
from cagsr.core.models.schemas import ScoreRecord
from cagsr.core.reward.attention_reward import reward
from cagsr.core.reward.salience import select_salient


class CrossAttentionScorer(RewardScorer):
    """Scores candidates with the attention reward, using idf salience from the training split."""

    def __init__(self, stats: CorpusStats, cfg: RewardConfig):
        self.stats = stats
        self.cfg = cfg

    def score(self, prompt_ids: Sequence[int], candidate: Candidate) -> RewardBreakdown:
        salient = select_salient(prompt_ids, self.stats, self.cfg)
        return reward(prompt_ids, candidate.content_ids, candidate.content_trace(), salient, self.cfg)

    def relevance(self, prompt_ids: Sequence[int], candidate: Candidate) -> float:
        salient = select_salient(prompt_ids, self.stats, self.cfg)
        return relevance_proxy(prompt_ids, candidate.content_ids, salient)


def score_trace_dump(entries: Sequence[TraceDumpEntry], stats: CorpusStats, cfg: RewardConfig) -> List[ScoreRecord]:
    """Recompute the reward of every response in a trace dump, without the model."""
    scorer = CrossAttentionScorer(stats, cfg)
    records = []
    for i, entry in enumerate(entries):
        entry.trace.validate()
        cand = Candidate(list(entry.token_ids), np.zeros(len(entry.token_ids)), entry.trace)
        b = scorer.score(entry.prompt_ids, cand)
        records.append(
            ScoreRecord(candidate_id=i, coverage=b.coverage, focus=b.focus, repeat_penalty=b.repeat_penalty, total=b.total)
        )
    return records
