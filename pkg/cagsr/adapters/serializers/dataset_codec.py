# === FILE: cagsr/adapters/serializers/dataset_codec.py ===
"""Dataset, vocabulary and corpus-statistics files."""
import json
from typing import List, Sequence

from loguru import logger

from cagsr.adapters.serializers.record_codec import dump_jsonl, parse_jsonl
from cagsr.core.entities.example import CorpusStats, Example
from cagsr.core.entities.vocabulary import Vocabulary
from cagsr.core.models.schemas import ExampleSchema
from cagsr.exceptions import SerializationError


def dump_examples(examples: Sequence[Example]) -> str:
    return dump_jsonl(ExampleSchema(id=e.id, prompt=e.prompt, answer=e.answer) for e in examples)


def parse_examples(text: str) -> List[Example]:
    return [Example(id=r.id, prompt=r.prompt, answer=r.answer) for r in parse_jsonl(text, ExampleSchema)]


def dump_vocabulary(vocab: Vocabulary) -> str:
    """One token per line; the line number is the id."""
    return "".join(f"{tok}\n" for tok in vocab.id_to_token)


def parse_vocabulary(text: str) -> Vocabulary:
    try:
        return Vocabulary(id_to_token=text.splitlines())
    except ValueError as exc:
        logger.exception("Bad vocabulary file")
        raise SerializationError(str(exc)) from exc


def dump_stats(stats: CorpusStats) -> str:
    df = {str(k): v for k, v in sorted(stats.df.items())}
    return json.dumps({"n_documents": stats.n_documents, "df": df}, indent=2)


def parse_stats(text: str) -> CorpusStats:
    try:
        raw = json.loads(text)
        return CorpusStats(n_documents=int(raw["n_documents"]), df={int(k): int(v) for k, v in raw["df"].items()})
    except (KeyError, ValueError, TypeError) as exc:
        logger.exception("Bad corpus statistics file")
        raise SerializationError(str(exc)) from exc
