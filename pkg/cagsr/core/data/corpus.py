# === FILE: cagsr/core/data/corpus.py ===
"""
Synthetic key-value lookup corpus.

Prompt:  query k17 ; facts : k3 = v8 k17 = v2 k5 = v1
Answer:  v2

The queried key is always among the facts, so the answer can be found by
attending to the prompt.
"""
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger

from cagsr.core.entities.example import Example
from cagsr.exceptions import ConfigError

PROMPT_HEAD_TOKENS = 5  # query <key> ; facts :
TOKENS_PER_FACT = 3  # <key> = <value>
MIN_PROMPT_TOKENS, MAX_PROMPT_TOKENS = 5, 20


def prompt_length(distractors_per_prompt: int) -> int:
    return PROMPT_HEAD_TOKENS + TOKENS_PER_FACT * (distractors_per_prompt + 1)


def build_toy_corpus(
    size: int,
    n_keys: int,
    n_values: int,
    distractors_per_prompt: int,
    seed: int,
) -> List[Example]:
    if size < 10:
        raise ConfigError(f"data.size must be >= 10, got {size}")
    length = prompt_length(distractors_per_prompt)
    if not MIN_PROMPT_TOKENS <= length <= MAX_PROMPT_TOKENS:
        raise ConfigError(
            f"data.distractors_per_prompt={distractors_per_prompt} gives {length}-token prompts; "
            f"allowed range is {MIN_PROMPT_TOKENS}-{MAX_PROMPT_TOKENS}"
        )
    if n_keys < distractors_per_prompt + 1:
        raise ConfigError(
            f"data.n_keys={n_keys} cannot supply {distractors_per_prompt + 1} distinct keys per prompt"
        )
    if n_values < 1:
        raise ConfigError("data.n_values must be >= 1")

    rng = np.random.default_rng(seed)
    examples: List[Example] = []
    for idx in range(size):
        query = int(rng.integers(n_keys))
        others = [k for k in range(n_keys) if k != query]
        distractors = rng.choice(others, size=distractors_per_prompt, replace=False).tolist()
        keys = [query, *distractors]
        rng.shuffle(keys)
        values = rng.integers(n_values, size=len(keys)).tolist()
        facts = " ".join(f"k{k} = v{v}" for k, v in zip(keys, values))
        answer = f"v{values[keys.index(query)]}"
        examples.append(Example(id=idx, prompt=f"query k{query} ; facts : {facts}", answer=answer))
    logger.debug("built toy corpus size={} prompt_len={}", size, length)
    return examples


def split(dataset: Sequence[Example], ratios: Sequence[float], seed: int) -> Tuple[List[Example], List[Example], List[Example]]:
    """Shuffle with `seed`, then cut into train/valid/test by `ratios`."""
    if len(ratios) != 3 or abs(sum(ratios) - 1.0) > 1e-9:
        raise ConfigError(f"data.split_ratios must be three values summing to 1, got {list(ratios)}")
    n = len(dataset)
    order = np.random.default_rng(seed).permutation(n)
    n_train = int(round(ratios[0] * n))
    n_valid = int(round(ratios[1] * n))
    shuffled = [dataset[i] for i in order]
    return shuffled[:n_train], shuffled[n_train : n_train + n_valid], shuffled[n_train + n_valid :]
