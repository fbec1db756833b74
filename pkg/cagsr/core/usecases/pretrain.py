# === FILE: cagsr/core/usecases/pretrain.py ===
import asyncio
import os

from loguru import logger

from cagsr.adapters.repository.file_repository import write_text_file
from cagsr.adapters.serializers.record_codec import dump_jsonl
from cagsr.core.data.pretrain import pretrain_supervised
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import RunConfig
from cagsr.core.models.usecase_result import UseCaseResult
from cagsr.core.usecases.artifacts import MODEL_FILE, check_model_fits, data_dir_for, load_dataset, open_run_dir, save_model
from cagsr.utils.timeit import timeit_async


class PretrainUseCase:
    """Supervised cross-entropy warm start; the result doubles as the No-RL baseline."""

    def __init__(self, config: RunConfig):
        self.config = config

    @timeit_async
    async def run(self, outputs_dir: str) -> UseCaseResult:
        cfg = self.config
        bundle = await load_dataset(data_dir_for(cfg, outputs_dir))
        check_model_fits(cfg.model, bundle)
        run_dir = await open_run_dir(outputs_dir, "pretrain", cfg)

        model = PolicyModel(cfg.model, seed=cfg.seed)
        logger.info("pretraining a {}-parameter model for {} epochs", model.n_parameters, cfg.data.pretrain_epochs)
        history = await asyncio.to_thread(
            pretrain_supervised,
            model,
            bundle.train,
            bundle.vocab,
            cfg.data.pretrain_epochs,
            cfg.data.pretrain_lr,
            bundle.valid,
            cfg.data.pretrain_batch_size,
            cfg.seed,
        )
        results = {
            "metrics": await write_text_file(os.path.join(run_dir, "metrics.jsonl"), dump_jsonl(history)),
            "checkpoint": await save_model(os.path.join(run_dir, MODEL_FILE), model, epochs=len(history)),
        }
        if history:
            results["valid_loss"] = history[-1].valid_loss
        return UseCaseResult(results=results)
