# === FILE: cagsr/core/reward/salience.py ===
import math
from typing import Sequence

from cagsr.core.entities.example import CorpusStats
from cagsr.core.entities.reward import SalientSet
from cagsr.core.entities.vocabulary import SPECIAL_IDS, Vocabulary
from cagsr.core.models.config import RewardConfig


def idf(token_id: int, stats: CorpusStats) -> float:
    return math.log(stats.n_documents / stats.doc_freq(token_id))


def salient_count(prompt_len: int, fraction: float) -> int:
    # the epsilon keeps 0.3 * 10 from rounding up to 4
    return max(1, math.ceil(fraction * prompt_len - 1e-9))


def select_salient(prompt_ids: Sequence[int], stats: CorpusStats, cfg: RewardConfig) -> SalientSet:
    """Positions of the highest-idf prompt tokens.

    Stopwords and special tokens are never chosen; ties go to the earlier
    position. A prompt with nothing eligible falls back to every non-special
    position (or every position if the prompt is made of special tokens only).
    """
    excluded = set(cfg.stopword_ids) | SPECIAL_IDS
    eligible = [pos for pos, tok in enumerate(prompt_ids) if tok not in excluded]
    if not eligible:
        fallback = [pos for pos, tok in enumerate(prompt_ids) if tok not in SPECIAL_IDS]
        return SalientSet(tuple(fallback or range(len(prompt_ids))))

    k = salient_count(len(prompt_ids), cfg.salient_fraction)
    ranked = sorted(eligible, key=lambda pos: (-idf(prompt_ids[pos], stats), pos))
    return SalientSet(tuple(sorted(ranked[:k])))


def resolve_stopwords(cfg: RewardConfig, vocab: Vocabulary) -> RewardConfig:
    """Copy of `cfg` whose stopword_ids also hold the ids of its in-vocabulary stopword strings."""
    ids = list(cfg.stopword_ids)
    for tok in cfg.stopwords:
        if tok in vocab and vocab.id_of(tok) not in ids:
            ids.append(vocab.id_of(tok))
    return cfg.model_copy(update={"stopword_ids": ids})
