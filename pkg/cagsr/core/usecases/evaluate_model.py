# === FILE: cagsr/core/usecases/evaluate_model.py ===
import asyncio
import os
from typing import Optional

from cagsr.adapters.repository.file_repository import write_bytes_atomic, write_json_file, write_text_file
from cagsr.adapters.serializers.record_codec import dump_jsonl
from cagsr.adapters.serializers.trace_dump_codec import encode_trace_dump
from cagsr.core.entities.attention_trace import TraceDumpEntry
from cagsr.core.eval.evaluate import evaluate
from cagsr.core.models.config import RunConfig
from cagsr.core.models.schemas import EvalReport
from cagsr.core.models.usecase_result import UseCaseResult
from cagsr.core.usecases.artifacts import MODEL_FILE, data_dir_for, load_dataset, load_model, open_run_dir
from cagsr.utils.timeit import timeit_async


class EvaluateModelUseCase:
    """Greedy evaluation of one checkpoint on one split; writes report, per-example records and traces."""

    def __init__(self, config: RunConfig):
        self.config = config

    @timeit_async
    async def run(
        self,
        outputs_dir: str,
        checkpoint: Optional[str] = None,
        split: str = "test",
        run_name: str = "eval",
    ) -> UseCaseResult:
        cfg = self.config
        checkpoint = checkpoint or os.path.join(outputs_dir, "cagsr", MODEL_FILE)
        bundle = await load_dataset(data_dir_for(cfg, outputs_dir))
        model, _ = await load_model(checkpoint)
        examples = bundle.split(split)
        reward_cfg = bundle.reward_config(cfg.reward)
        report, candidates = await asyncio.to_thread(evaluate, model, examples, bundle.vocab, bundle.stats, reward_cfg)

        run_dir = await open_run_dir(outputs_dir, run_name, cfg)
        dump = [
            TraceDumpEntry(prompt_ids=prompt, token_ids=list(cand.token_ids), trace=cand.trace)
            for prompt, cand in zip(bundle.prompt_ids(split), candidates)
        ]
        summary = report.model_dump(mode="json", exclude={"records"})
        results = {
            "report": await write_json_file(os.path.join(run_dir, "report.json"), summary),
            "examples": await write_text_file(os.path.join(run_dir, "examples.jsonl"), dump_jsonl(report.records)),
            "traces": await write_bytes_atomic(os.path.join(run_dir, "traces.npz"), encode_trace_dump(dump)),
            "eval_report": report,
        }
        return UseCaseResult(results=results)


def report_of(result: UseCaseResult) -> EvalReport:
    return result.results["eval_report"]
