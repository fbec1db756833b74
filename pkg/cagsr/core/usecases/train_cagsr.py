# === FILE: cagsr/core/usecases/train_cagsr.py ===
"""
Reinforcement fine-tuning with the cross-attention reward.

Run directory layout:
    config.json, env.json
    metrics.jsonl                one IterationMetrics per line
    checkpoints/iter_NNNNNN.ckpt model + Adam state after NNNNNN iterations
    model.ckpt                   final parameters
    summary.json                 held-out mean reward
"""
import glob
import os
import re
from typing import List, Optional, Tuple

import numpy as np
from loguru import logger

from cagsr.adapters.repository.file_repository import append_text_file, read_text_file, write_json_file, write_text_file
from cagsr.adapters.serializers.record_codec import dump_jsonl, parse_jsonl, record_line
from cagsr.core.autodiff.optim import AdamState
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import RunConfig
from cagsr.core.models.schemas import IterationMetrics
from cagsr.core.models.usecase_result import UseCaseResult
from cagsr.core.reward.scorer import CrossAttentionScorer
from cagsr.core.rl.loop import held_out_reward, optimizer_for, train
from cagsr.core.usecases.artifacts import (
    MODEL_FILE,
    check_model_fits,
    data_dir_for,
    load_dataset,
    load_model,
    open_run_dir,
    save_model,
    warm_start,
)
from cagsr.utils.timeit import timeit_async

CHECKPOINT_DIR = "checkpoints"
_CHECKPOINT_RE = re.compile(r"iter_(\d+)\.ckpt$")


def checkpoint_name(iterations_done: int) -> str:
    return f"iter_{iterations_done:06d}.ckpt"


def latest_checkpoint(run_dir: str) -> Optional[Tuple[int, str]]:
    found = []
    for path in glob.glob(os.path.join(run_dir, CHECKPOINT_DIR, "iter_*.ckpt")):
        match = _CHECKPOINT_RE.search(path)
        if match:
            found.append((int(match.group(1)), path))
    return max(found) if found else None


class TrainCagsrUseCase:
    """Resumable CAGSR training into `outputs_dir/run_name`."""

    def __init__(self, config: RunConfig):
        self.config = config

    async def _resume(self, run_dir: str, outputs_dir: str) -> Tuple[PolicyModel, AdamState, int, List[IterationMetrics]]:
        cfg = self.config
        latest = latest_checkpoint(run_dir)
        if latest is None:
            return await warm_start(cfg, outputs_dir), optimizer_for(cfg.train), 0, []

        done, path = latest
        model, ckpt = await load_model(path)
        state = ckpt.adam if ckpt.adam is not None else optimizer_for(cfg.train)
        metrics_path = os.path.join(run_dir, "metrics.jsonl")
        history: List[IterationMetrics] = []
        if os.path.exists(metrics_path):
            history = [m for m in parse_jsonl(await read_text_file(metrics_path), IterationMetrics) if m.iteration < done]
        await write_text_file(metrics_path, dump_jsonl(history))
        logger.warning("resuming {} from {} after {} iterations", run_dir, path, done)
        return model, state, done, history

    @timeit_async
    async def run(self, outputs_dir: str, run_name: str = "cagsr") -> UseCaseResult:
        cfg = self.config
        bundle = await load_dataset(data_dir_for(cfg, outputs_dir))
        check_model_fits(cfg.model, bundle)
        run_dir = os.path.join(outputs_dir, run_name)
        model, state, start, history = await self._resume(run_dir, outputs_dir)
        run_dir = await open_run_dir(outputs_dir, run_name, cfg)

        metrics_path = os.path.join(run_dir, "metrics.jsonl")
        if start == 0:
            await write_text_file(metrics_path, "")
        checkpoints = os.path.join(run_dir, CHECKPOINT_DIR)

        async def on_iteration(metrics: IterationMetrics) -> None:
            await append_text_file(metrics_path, record_line(metrics))
            done = metrics.iteration + 1
            if done % cfg.train.checkpoint_every == 0 or done == cfg.train.total_iterations:
                await save_model(os.path.join(checkpoints, checkpoint_name(done)), model, state, iteration=done)

        train_prompts = bundle.prompt_ids("train")
        reward_cfg = bundle.reward_config(cfg.reward)
        floor = float(np.mean([reward_cfg.floor_for(len(p)) for p in train_prompts]))
        scorer = CrossAttentionScorer(bundle.stats, reward_cfg)
        new = await train(
            model,
            train_prompts,
            scorer,
            cfg.train,
            cfg.sampling,
            state=state,
            start_iteration=start,
            entropy_floor=floor,
            previous=history[-1] if history else None,
            on_iteration=on_iteration,
        )
        history.extend(new)

        held_out = bundle.prompt_ids("valid")[: cfg.train.eval_prompts]
        final_reward = held_out_reward(model, held_out, scorer, cfg.sampling) if held_out else 0.0
        logger.info("held-out mean reward after {} iterations: {:.4f}", len(history), final_reward)
        results = {
            "metrics": metrics_path,
            "checkpoint": await save_model(os.path.join(run_dir, MODEL_FILE), model, iteration=len(history)),
            "held_out_reward": final_reward,
        }
        summary = {"iterations": len(history), "held_out_reward": final_reward}
        if history:
            summary["final_mean_reward"] = history[-1].mean_reward
        results["summary"] = await write_json_file(os.path.join(run_dir, "summary.json"), summary)
        return UseCaseResult(results=results)
