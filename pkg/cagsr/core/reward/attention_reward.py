# === FILE: cagsr/core/reward/attention_reward.py ===
"""
Self-supervised reward from decoding-time cross-attention:

    total = alpha * coverage + beta * focus - gamma * repeat_penalty

All functions are pure; they never mutate their inputs.
"""
from typing import List, Sequence, Tuple

import numpy as np

from cagsr.core.entities.attention_trace import AttentionTrace
from cagsr.core.entities.reward import RewardBreakdown, SalientSet
from cagsr.core.models.config import RewardConfig
from cagsr.exceptions import ContractError

LOG_EPS = 1e-12


def aggregate_attention(trace: AttentionTrace) -> np.ndarray:
    """Mean over the traced layers at every step: (|y|, |x|)."""
    rows = np.asarray(trace.rows, dtype=np.float64)
    if rows.ndim != 3 or rows.shape[1] != len(trace.layer_indices) or rows.shape[2] != trace.prompt_len:
        raise ContractError(
            f"malformed trace: rows {rows.shape}, {len(trace.layer_indices)} layers, prompt_len {trace.prompt_len}"
        )
    return rows.mean(axis=1)


def coverage(attn: np.ndarray, salient: SalientSet) -> float:
    """Attention mass on the salient positions, averaged over steps and salient positions.
    The ceiling is 1/|salient|."""
    n_steps = attn.shape[0]
    if n_steps < 1:
        raise ContractError("coverage needs at least one decoding step")
    idx = list(salient.indices)
    return float(attn[:, idx].sum() / (n_steps * len(idx)))


def step_entropies(attn: np.ndarray) -> np.ndarray:
    ent = -np.sum(attn * np.log(attn + LOG_EPS), axis=1)
    return np.maximum(ent, 0.0)


def focus(attn: np.ndarray, cfg: RewardConfig) -> Tuple[float, List[float]]:
    """Negative mean entropy; steps below the entropy floor count as the floor."""
    entropies = step_entropies(attn)
    floor = cfg.floor_for(attn.shape[1])
    effective = np.maximum(entropies, floor)
    return float(-effective.mean()), entropies.tolist()


def repeat_penalty(response_ids: Sequence[int], cfg: RewardConfig) -> float:
    """1 - distinct/total over n-grams of size cfg.ngram_n; 0 when there are none."""
    n = cfg.ngram_n
    total = len(response_ids) - n + 1
    if total <= 0:
        return 0.0
    grams = [tuple(response_ids[i : i + n]) for i in range(total)]
    return 1.0 - len(set(grams)) / total


def reward(
    prompt_ids: Sequence[int],
    response_ids: Sequence[int],
    trace: AttentionTrace,
    salient: SalientSet,
    cfg: RewardConfig,
) -> RewardBreakdown:
    if len(response_ids) == 0:
        return RewardBreakdown(coverage=0.0, focus=0.0, repeat_penalty=0.0, total=cfg.empty_reward, empty=True)
    if trace.prompt_len != len(prompt_ids) or trace.response_len != len(response_ids):
        raise ContractError(
            f"trace covers {trace.response_len}x{trace.prompt_len} but response/prompt are "
            f"{len(response_ids)}x{len(prompt_ids)}"
        )
    attn = aggregate_attention(trace)
    cov = coverage(attn, salient)
    foc, entropies = focus(attn, cfg)
    pen = repeat_penalty(response_ids, cfg)
    total = cfg.alpha * cov + cfg.beta * foc - cfg.gamma * pen
    return RewardBreakdown(coverage=cov, focus=foc, repeat_penalty=pen, total=total, entropy_per_step=entropies)
