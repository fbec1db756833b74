# === FILE: cagsr/core/data/stats.py ===
from collections import Counter
from typing import Sequence

from cagsr.core.data.tokenizer import tokenize
from cagsr.core.entities.example import CorpusStats, Example
from cagsr.core.entities.vocabulary import Vocabulary
from cagsr.exceptions import ContractError


def corpus_stats(train_split: Sequence[Example], vocab: Vocabulary) -> CorpusStats:
    """Document frequency of each token id, one document per prompt."""
    if not train_split:
        raise ContractError("corpus_stats needs a nonempty split")
    df: Counter = Counter()
    for ex in train_split:
        df.update(set(tokenize(ex.prompt, vocab)))
    return CorpusStats(n_documents=len(train_split), df=dict(df))
