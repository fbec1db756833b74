# === FILE: cagsr/core/data/pretrain.py ===
"""Teacher-forced cross-entropy training: the supervised warm start and the No-RL baseline."""
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from cagsr.core.autodiff import ops
from cagsr.core.autodiff.optim import AdamState, adam_step
from cagsr.core.autodiff.tensor import Tape, no_grad
from cagsr.core.data.tokenizer import encode_example
from cagsr.core.entities.example import Example
from cagsr.core.entities.vocabulary import BOS_ID, Vocabulary
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.schemas import EpochMetrics
from cagsr.exceptions import DivergenceError


def _encoded(examples: Sequence[Example], vocab: Vocabulary) -> List[Tuple[List[int], List[int]]]:
    return [encode_example(ex, vocab) for ex in examples]


def mean_token_nll(model: PolicyModel, pairs: Sequence[Tuple[List[int], List[int]]]) -> float:
    total, count = 0.0, 0
    with no_grad():
        for prompt_ids, target_ids in pairs:
            logp = model.log_prob(prompt_ids, target_ids).data
            total -= float(logp.astype(np.float64).sum())
            count += len(target_ids)
    return total / max(count, 1)


def pretrain_supervised(
    model: PolicyModel,
    train_split: Sequence[Example],
    vocab: Vocabulary,
    epochs: int,
    lr: float,
    valid_split: Optional[Sequence[Example]] = None,
    batch_size: int = 16,
    seed: int = 0,
) -> List[EpochMetrics]:
    """Minimise teacher-forced cross-entropy in place; returns one record per epoch."""
    train_pairs = _encoded(train_split, vocab)
    valid_pairs = _encoded(valid_split, vocab) if valid_split else []
    state = AdamState(lr=lr)
    history: List[EpochMetrics] = []

    for epoch in range(1, epochs + 1):
        order = np.random.default_rng([seed, epoch]).permutation(len(train_pairs))
        running, batches = 0.0, 0
        for start in range(0, len(order), batch_size):
            chunk = [train_pairs[i] for i in order[start : start + batch_size]]
            with Tape() as tape:
                losses = []
                for prompt_ids, target_ids in chunk:
                    enc = model.encode(prompt_ids)
                    logits, _ = model.decode(enc, [BOS_ID, *target_ids[:-1]])
                    losses.append(ops.cross_entropy(logits, target_ids))
                loss = ops.mul(ops.sum(ops.concat([ops.reshape(l, (1,)) for l in losses])), 1.0 / len(losses))
            value = loss.item()
            if not math.isfinite(value):
                raise DivergenceError(f"pretraining loss became {value} at epoch {epoch}")
            tape.backward(loss)
            adam_step(model.parameters(), state)
            running += value
            batches += 1

        record = EpochMetrics(
            epoch=epoch,
            train_loss=running / max(batches, 1),
            valid_loss=mean_token_nll(model, valid_pairs) if valid_pairs else None,
        )
        history.append(record)
        logger.info("pretrain epoch={} train_loss={:.4f} valid_loss={}", epoch, record.train_loss, record.valid_loss)
    return history
