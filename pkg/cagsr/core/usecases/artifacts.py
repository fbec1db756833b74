# === FILE: cagsr/core/usecases/artifacts.py ===
"""Artifact-directory plumbing shared by the use cases."""
import os
from dataclasses import dataclass
from typing import List, Optional, Tuple

from loguru import logger

from cagsr.adapters.repository.file_repository import read_bytes_file, read_text_file, write_bytes_atomic, write_json_file
from cagsr.adapters.serializers.checkpoint_codec import (
    Checkpoint,
    checkpoint_from_model,
    decode_checkpoint,
    encode_checkpoint,
)
from cagsr.adapters.serializers.dataset_codec import parse_examples, parse_stats, parse_vocabulary
from cagsr.core.autodiff.optim import AdamState
from cagsr.core.data.tokenizer import tokenize
from cagsr.core.entities.example import CorpusStats, Example
from cagsr.core.entities.vocabulary import Vocabulary
from cagsr.core.model.policy import PolicyModel
from cagsr.core.models.config import ModelConfig, RewardConfig, RunConfig
from cagsr.core.reward.salience import resolve_stopwords
from cagsr.exceptions import ConfigError
from cagsr.utils.io_helpers import ensure_outputs_dir, environment_stamp

SPLITS = ("train", "valid", "test")
VOCAB_FILE = "vocab.txt"
STATS_FILE = "stats.json"
MODEL_FILE = "model.ckpt"


@dataclass
class DatasetBundle:
    train: List[Example]
    valid: List[Example]
    test: List[Example]
    vocab: Vocabulary
    stats: CorpusStats

    def split(self, name: str) -> List[Example]:
        if name not in SPLITS:
            raise ConfigError(f"unknown split {name!r}; expected one of {', '.join(SPLITS)}")
        return getattr(self, name)

    def prompt_ids(self, name: str) -> List[List[int]]:
        return [tokenize(ex.prompt, self.vocab) for ex in self.split(name)]

    def reward_config(self, cfg: RewardConfig) -> RewardConfig:
        return resolve_stopwords(cfg, self.vocab)


async def open_run_dir(outputs_dir: str, run_name: str, cfg: RunConfig) -> str:
    """Create `outputs_dir/run_name` and stamp it with the resolved config and environment."""
    run_dir = ensure_outputs_dir(os.path.join(outputs_dir, run_name))
    await write_json_file(os.path.join(run_dir, "config.json"), cfg.model_dump(mode="json"))
    await write_json_file(os.path.join(run_dir, "env.json"), environment_stamp())
    return run_dir


def data_dir_for(cfg: RunConfig, outputs_dir: str) -> str:
    return cfg.paths.data_dir or os.path.join(outputs_dir, "data")


async def load_dataset(data_dir: str) -> DatasetBundle:
    splits = [parse_examples(await read_text_file(os.path.join(data_dir, f"{name}.jsonl"))) for name in SPLITS]
    vocab = parse_vocabulary(await read_text_file(os.path.join(data_dir, VOCAB_FILE)))
    stats = parse_stats(await read_text_file(os.path.join(data_dir, STATS_FILE)))
    logger.info("loaded dataset from {}: {}/{}/{} examples", data_dir, *(len(s) for s in splits))
    return DatasetBundle(*splits, vocab=vocab, stats=stats)


def check_model_fits(model_cfg: ModelConfig, bundle: DatasetBundle) -> None:
    examples = [*bundle.train, *bundle.valid, *bundle.test]
    if len(bundle.vocab) > model_cfg.vocab_size:
        raise ConfigError(f"model.vocab_size={model_cfg.vocab_size} is below the corpus vocabulary of {len(bundle.vocab)}")
    longest = max((len(ex.prompt.split()) for ex in examples), default=0)
    if longest > model_cfg.max_prompt_len:
        raise ConfigError(f"model.max_prompt_len={model_cfg.max_prompt_len} is below the longest prompt ({longest})")
    answer = max((len(ex.answer.split()) for ex in examples), default=0)
    if answer + 1 > model_cfg.max_response_len:
        raise ConfigError(f"model.max_response_len={model_cfg.max_response_len} cannot hold answers plus <eos>")


async def load_checkpoint(path: str) -> Checkpoint:
    return decode_checkpoint(await read_bytes_file(path))


async def load_model(path: str) -> Tuple[PolicyModel, Checkpoint]:
    ckpt = await load_checkpoint(path)
    return PolicyModel(ckpt.model_config, arrays=ckpt.arrays), ckpt


async def save_model(path: str, model: PolicyModel, adam: Optional[AdamState] = None, **state) -> str:
    ckpt = checkpoint_from_model(model, adam, **state)
    return await write_bytes_atomic(path, encode_checkpoint(ckpt))


async def warm_start(cfg: RunConfig, outputs_dir: str) -> PolicyModel:
    """The supervised checkpoint when one exists, otherwise a freshly initialised model."""
    path = cfg.paths.init_checkpoint or os.path.join(outputs_dir, "pretrain", MODEL_FILE)
    if os.path.exists(path):
        model, _ = await load_model(path)
        logger.info("warm start from {}", path)
        return model
    if cfg.paths.init_checkpoint:
        raise FileNotFoundError(f"init checkpoint not found: {path}")
    logger.warning("no supervised checkpoint at {}; starting from random initialisation", path)
    return PolicyModel(cfg.model, seed=cfg.seed)
