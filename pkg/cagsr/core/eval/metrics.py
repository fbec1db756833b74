# === FILE: cagsr/core/eval/metrics.py ===
import math
from typing import Iterable, Sequence, Tuple

import numpy as np

from cagsr.core.autodiff.tensor import no_grad
from cagsr.core.entities.reward import SalientSet
from cagsr.core.entities.vocabulary import PAD_ID
from cagsr.exceptions import ContractError


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Longest common subsequence length by dynamic programming, O(|a||b|)."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            curr[j] = prev[j - 1] + 1 if x == y else max(prev[j], curr[j - 1])
        prev = curr
    return prev[-1]


def rouge_l(hypothesis: Sequence, reference: Sequence) -> Tuple[float, float, float]:
    """(precision, recall, f1) of the LCS between hypothesis and reference."""
    lcs = lcs_length(hypothesis, reference)
    if lcs == 0:
        return 0.0, 0.0, 0.0
    precision = lcs / len(hypothesis)
    recall = lcs / len(reference)
    return precision, recall, 2 * precision * recall / (precision + recall)


def relevance_proxy(prompt_ids: Sequence[int], response_ids: Sequence[int], salient: SalientSet) -> float:
    """Share of distinct salient prompt tokens that appear anywhere in the response."""
    if len(salient) == 0:
        raise ContractError("relevance_proxy needs a nonempty salient set")
    wanted = {prompt_ids[i] for i in salient.indices}
    return len(wanted & set(response_ids)) / len(wanted)


def perplexity(model, pairs: Iterable[Tuple[Sequence[int], Sequence[int]]]) -> float:
    """exp of the mean per-token negative log-likelihood under teacher forcing.

    `pairs` yields (prompt_ids, target_ids) where targets already end with EOS;
    PAD targets are not counted.
    """
    total_nll = 0.0
    n_tokens = 0
    with no_grad():
        for prompt_ids, target_ids in pairs:
            logp = model.log_prob(prompt_ids, target_ids).data.astype(np.float64)
            keep = np.asarray(target_ids) != PAD_ID
            total_nll -= float(logp[keep].sum())
            n_tokens += int(keep.sum())
    if n_tokens == 0:
        raise ContractError("perplexity needs at least one scored token")
    return math.exp(total_nll / n_tokens)
