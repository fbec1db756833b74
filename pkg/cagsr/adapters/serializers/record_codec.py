# === FILE: cagsr/adapters/serializers/record_codec.py ===
"""Line-delimited JSON for pydantic records; field order follows the schema."""
from typing import Iterable, List, Type, TypeVar

from loguru import logger
from pydantic import BaseModel, ValidationError

from cagsr.exceptions import SerializationError

M = TypeVar("M", bound=BaseModel)


def record_line(record: BaseModel) -> str:
    return record.model_dump_json() + "\n"


def dump_jsonl(records: Iterable[BaseModel]) -> str:
    return "".join(record_line(r) for r in records)


def parse_jsonl(text: str, schema: Type[M]) -> List[M]:
    records: List[M] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(schema.model_validate_json(line))
        except ValidationError as exc:
            logger.exception("Bad {} record on line {}", schema.__name__, lineno)
            raise SerializationError(f"line {lineno}: {exc}") from exc
    return records
