# === FILE: cagsr/core/entities/example.py ===
from dataclasses import dataclass, field
from typing import Dict


@dataclass(frozen=True)
class Example:
    id: int
    prompt: str
    answer: str


@dataclass
class CorpusStats:
    """Document frequencies over the prompts of one split."""
    n_documents: int
    df: Dict[int, int] = field(default_factory=dict)

    def doc_freq(self, token_id: int) -> int:
        # absent tokens count as seen once, i.e. maximal idf
        return self.df.get(token_id, 1)
