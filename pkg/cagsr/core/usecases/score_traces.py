# === FILE: cagsr/core/usecases/score_traces.py ===
import os

import numpy as np
from loguru import logger

from cagsr.adapters.repository.file_repository import read_bytes_file, write_text_file
from cagsr.adapters.serializers.record_codec import dump_jsonl
from cagsr.adapters.serializers.trace_dump_codec import decode_trace_dump
from cagsr.core.models.config import RunConfig
from cagsr.core.models.usecase_result import UseCaseResult
from cagsr.core.reward.scorer import score_trace_dump
from cagsr.core.usecases.artifacts import data_dir_for, load_dataset, open_run_dir
from cagsr.utils.timeit import timeit_async


class ScoreTracesUseCase:
    """Recompute rewards for a saved attention-trace dump without loading a model."""

    def __init__(self, config: RunConfig):
        self.config = config

    @timeit_async
    async def run(self, outputs_dir: str, traces_path: str) -> UseCaseResult:
        bundle = await load_dataset(data_dir_for(self.config, outputs_dir))
        entries = decode_trace_dump(await read_bytes_file(traces_path))
        records = score_trace_dump(entries, bundle.stats, bundle.reward_config(self.config.reward))
        run_dir = await open_run_dir(outputs_dir, "score", self.config)
        path = await write_text_file(os.path.join(run_dir, "scores.jsonl"), dump_jsonl(records))
        mean_total = float(np.mean([r.total for r in records])) if records else 0.0
        logger.info("scored {} candidates from {}: mean total {:.4f}", len(records), traces_path, mean_total)
        return UseCaseResult(results={"scores": path, "n_candidates": len(records), "mean_total": mean_total})
