# === FILE: cagsr/core/entities/candidate.py ===
from dataclasses import dataclass
from typing import List

import numpy as np

from cagsr.core.entities.attention_trace import AttentionTrace
from cagsr.core.entities.vocabulary import EOS_ID


@dataclass
class Candidate:
    """One sampled response with the log-probabilities and attention recorded while sampling."""
    token_ids: List[int]
    logprob_old: np.ndarray
    trace: AttentionTrace

    @property
    def ended_with_eos(self) -> bool:
        return bool(self.token_ids) and self.token_ids[-1] == EOS_ID

    @property
    def content_ids(self) -> List[int]:
        """Response tokens without the terminating end-of-sequence token."""
        return self.token_ids[:-1] if self.ended_with_eos else list(self.token_ids)

    def content_trace(self) -> AttentionTrace:
        return self.trace.head(len(self.content_ids))
