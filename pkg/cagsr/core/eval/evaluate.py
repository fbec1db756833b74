# === FILE: cagsr/core/eval/evaluate.py ===
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger

from cagsr.core.data.tokenizer import detokenize, encode_example
from cagsr.core.entities.candidate import Candidate
from cagsr.core.entities.example import CorpusStats, Example
from cagsr.core.entities.vocabulary import Vocabulary
from cagsr.core.eval.metrics import perplexity, rouge_l
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import RewardConfig, SamplingConfig
from cagsr.core.models.schemas import EvalReport, ExampleRecord
from cagsr.core.reward.scorer import CrossAttentionScorer
from cagsr.exceptions import InputError

GREEDY = SamplingConfig(temperature=0.0)


def evaluate(
    model: PolicyModel,
    examples: Sequence[Example],
    vocab: Vocabulary,
    stats: CorpusStats,
    reward_cfg: RewardConfig,
) -> Tuple[EvalReport, List[Candidate]]:
    """Greedy-decode every example and report text and attention metrics.

    Returns the report and the decoded candidates (in example order) so callers
    can dump their attention traces.
    """
    if not examples:
        raise InputError("evaluate needs at least one example")
    scorer = CrossAttentionScorer(stats, reward_cfg)
    pairs = [encode_example(ex, vocab) for ex in examples]
    records: List[ExampleRecord] = []
    candidates: List[Candidate] = []
    rouge = []

    for ex, (prompt_ids, target_ids) in zip(examples, pairs):
        cand = model.generate(prompt_ids, GREEDY, 1)[0]
        hyp, ref = cand.content_ids, target_ids[:-1]
        breakdown = scorer.score(prompt_ids, cand)
        p, r, f1 = rouge_l(hyp, ref)
        rouge.append((p, r, f1))
        records.append(
            ExampleRecord(
                id=ex.id,
                prompt=ex.prompt,
                reference=ex.answer,
                hypothesis=detokenize(hyp, vocab),
                exact_match=hyp == ref,
                rouge_l_f1=f1,
                relevance=scorer.relevance(prompt_ids, cand),
                coverage=breakdown.coverage,
                entropy=breakdown.mean_entropy,
                repeat_penalty=breakdown.repeat_penalty,
            )
        )
        candidates.append(cand)

    rouge_arr = np.asarray(rouge)
    report = EvalReport(
        n_examples=len(records),
        mean_relevance=float(np.mean([r.relevance for r in records])),
        mean_rouge_l_precision=float(rouge_arr[:, 0].mean()),
        mean_rouge_l_recall=float(rouge_arr[:, 1].mean()),
        mean_rouge_l_f1=float(rouge_arr[:, 2].mean()),
        perplexity=perplexity(model, pairs),
        mean_coverage=float(np.mean([r.coverage for r in records])),
        mean_entropy=float(np.mean([r.entropy for r in records])),
        mean_repeat_penalty=float(np.mean([r.repeat_penalty for r in records])),
        exact_match_rate=float(np.mean([r.exact_match for r in records])),
        records=records,
    )
    logger.info(
        "evaluated {} examples: exact_match={:.3f} rouge_l_f1={:.3f} coverage={:.4f}",
        report.n_examples,
        report.exact_match_rate,
        report.mean_rouge_l_f1,
        report.mean_coverage,
    )
    return report, candidates
