# === FILE: tests/test_end_to_end.py ===
"""Directional checks on the full toy pipeline. Each takes minutes; run with `-m slow`."""
import os

import pytest

from cagsr.adapters.repository.file_repository import read_text_file
from cagsr.adapters.serializers.record_codec import parse_jsonl
from cagsr.core.models.config import RunConfig
from cagsr.core.models.schemas import IterationMetrics
from cagsr.core.usecases.evaluate_model import EvaluateModelUseCase, report_of
from cagsr.core.usecases.make_dataset import MakeDatasetUseCase
from cagsr.core.usecases.pretrain import PretrainUseCase
from cagsr.core.usecases.run_ablation import RunAblationUseCase
from cagsr.core.usecases.train_cagsr import TrainCagsrUseCase

SEEDS = (0, 1, 2)


async def _prepared(tmp_path, seed: int, **train) -> tuple[RunConfig, str]:
    cfg = RunConfig.model_validate({"seed": seed, "train": {"rollout_workers": 4, **train}})
    out = str(tmp_path / f"seed{seed}")
    await MakeDatasetUseCase(cfg).run(out)
    await PretrainUseCase(cfg).run(out)
    return cfg, out


async def _cagsr_beats_pretraining(tmp_path, seed: int) -> bool:
    cfg, out = await _prepared(tmp_path, seed)
    baseline = report_of(
        await EvaluateModelUseCase(cfg).run(out, checkpoint=os.path.join(out, "pretrain", "model.ckpt"), run_name="eval_norl")
    )
    await TrainCagsrUseCase(cfg).run(out)
    trained = report_of(await EvaluateModelUseCase(cfg).run(out))
    return (
        trained.mean_coverage >= 1.2 * baseline.mean_coverage
        and trained.mean_entropy < baseline.mean_entropy
        and trained.mean_relevance >= baseline.mean_relevance - 0.02
    )


@pytest.mark.slow
@pytest.mark.asyncio
async def test_cagsr_sharpens_attention_on_most_seeds(tmp_path):
    passed = [await _cagsr_beats_pretraining(tmp_path, seed) for seed in SEEDS]
    assert sum(passed) >= 2, passed


@pytest.mark.slow
@pytest.mark.asyncio
async def test_removing_a_reward_term_loses_what_it_rewarded(tmp_path):
    repeat_ok, coverage_ok = 0, 0
    for seed in SEEDS:
        cfg, out = await _prepared(tmp_path, seed, total_iterations=100)
        result = await RunAblationUseCase(cfg).run(out, variants=("full", "no_coverage", "no_repeat"))
        rows = {r.variant: r for r in result.results["rows"]}
        repeat_ok += rows["no_repeat"].mean_repeat_penalty >= rows["full"].mean_repeat_penalty
        coverage_ok += rows["no_coverage"].mean_coverage <= rows["full"].mean_coverage
    assert repeat_ok >= 2
    assert coverage_ok >= 2


@pytest.mark.slow
@pytest.mark.asyncio
async def test_pretrained_model_answers_most_held_out_queries(tmp_path):
    cfg, out = await _prepared(tmp_path, 0)
    result = await EvaluateModelUseCase(cfg).run(
        out, checkpoint=os.path.join(out, "pretrain", "model.ckpt"), run_name="eval_norl"
    )
    assert report_of(result).exact_match_rate >= 0.6


@pytest.mark.slow
@pytest.mark.asyncio
async def test_default_toy_run_never_trips_the_hacking_wire(tmp_path):
    cfg, out = await _prepared(tmp_path, 0)
    result = await TrainCagsrUseCase(cfg).run(out)
    history = parse_jsonl(await read_text_file(result.results["metrics"]), IterationMetrics)
    assert len(history) == cfg.train.total_iterations
    assert not [m.iteration for m in history if m.tripwire]
