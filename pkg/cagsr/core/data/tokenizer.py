# === FILE: cagsr/core/data/tokenizer.py ===
from typing import Iterable, List, Sequence

from cagsr.core.entities.example import Example
from cagsr.core.entities.vocabulary import EOS_ID, SPECIAL_IDS, Vocabulary


def tokenize(text: str, vocab: Vocabulary) -> List[int]:
    """Whitespace tokenization; unseen tokens map to <unk>."""
    return [vocab.id_of(tok) for tok in text.split()]


def detokenize(ids: Sequence[int], vocab: Vocabulary, skip_special: bool = False) -> str:
    return " ".join(vocab.token_of(i) for i in ids if not (skip_special and i in SPECIAL_IDS))


def build_vocabulary(examples: Iterable[Example]) -> Vocabulary:
    """Closed vocabulary in first-appearance order (prompt before answer, corpus order)."""
    vocab = Vocabulary()
    for ex in examples:
        for tok in ex.prompt.split():
            vocab.add(tok)
        for tok in ex.answer.split():
            vocab.add(tok)
    return vocab


def encode_example(ex: Example, vocab: Vocabulary) -> tuple[List[int], List[int]]:
    """(prompt ids, answer ids + EOS) ready for teacher forcing."""
    return tokenize(ex.prompt, vocab), [*tokenize(ex.answer, vocab), EOS_ID]
