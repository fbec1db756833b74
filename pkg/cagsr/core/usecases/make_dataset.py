# === FILE: cagsr/core/usecases/make_dataset.py ===
import os

from loguru import logger

from cagsr.adapters.repository.file_repository import write_text_file
from cagsr.adapters.serializers.dataset_codec import dump_examples, dump_stats, dump_vocabulary
from cagsr.core.data.corpus import build_toy_corpus, split
from cagsr.core.data.stats import corpus_stats
from cagsr.core.data.tokenizer import build_vocabulary
from cagsr.core.models.config import RunConfig
from cagsr.core.models.usecase_result import UseCaseResult
from cagsr.core.usecases.artifacts import STATS_FILE, VOCAB_FILE, open_run_dir
from cagsr.utils.timeit import timeit_async


class MakeDatasetUseCase:
    """Generate the toy corpus, its splits, the vocabulary and training-split statistics."""

    def __init__(self, config: RunConfig):
        self.config = config

    @timeit_async
    async def run(self, outputs_dir: str) -> UseCaseResult:
        data = self.config.data
        run_dir = await open_run_dir(outputs_dir, "data", self.config)

        corpus = build_toy_corpus(data.size, data.n_keys, data.n_values, data.distractors_per_prompt, data.seed)
        train, valid, test = split(corpus, data.split_ratios, data.seed)
        vocab = build_vocabulary(corpus)
        stats = corpus_stats(train, vocab)

        results = {}
        for name, examples in (("train", train), ("valid", valid), ("test", test)):
            results[name] = await write_text_file(os.path.join(run_dir, f"{name}.jsonl"), dump_examples(examples))
        results["vocab"] = await write_text_file(os.path.join(run_dir, VOCAB_FILE), dump_vocabulary(vocab))
        results["stats"] = await write_text_file(os.path.join(run_dir, STATS_FILE), dump_stats(stats))
        logger.info("wrote {} examples and a {}-token vocabulary to {}", len(corpus), len(vocab), run_dir)
        return UseCaseResult(results=results)
