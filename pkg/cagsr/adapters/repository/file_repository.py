# === FILE: cagsr/adapters/repository/file_repository.py ===
import json
import os
import tempfile
from typing import Any

import aiofiles
from loguru import logger

from cagsr.exceptions import RepositoryError


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


async def write_bytes_atomic(path: str, content: bytes) -> str:
    """Write to a temporary sibling file, then rename over `path`."""
    tmp = None
    try:
        _ensure_parent(path)
        fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=os.path.dirname(os.path.abspath(path)))
        os.close(fd)
        async with aiofiles.open(tmp, "wb") as f:
            await f.write(content)
        os.replace(tmp, path)
        return path
    except Exception as exc:
        logger.exception("Failed to write file atomically: {}", path)
        if tmp is not None and os.path.exists(tmp):
            os.remove(tmp)
        raise RepositoryError(str(exc)) from exc


async def write_text_file(path: str, content: str) -> str:
    return await write_bytes_atomic(path, content.encode("utf-8"))


async def write_json_file(path: str, data: Any) -> str:
    try:
        text = json.dumps(data, ensure_ascii=False, indent=2)
    except (TypeError, ValueError) as exc:
        logger.exception("Failed to write json file: {}", path)
        raise RepositoryError(str(exc)) from exc
    return await write_text_file(path, text + "\n")


async def append_text_file(path: str, content: str) -> str:
    try:
        _ensure_parent(path)
        async with aiofiles.open(path, "a", encoding="utf-8") as f:
            await f.write(content)
        return path
    except Exception as exc:
        logger.exception("Failed to append to file: {}", path)
        raise RepositoryError(str(exc)) from exc


async def read_bytes_file(path: str) -> bytes:
    try:
        async with aiofiles.open(path, "rb") as f:
            return await f.read()
    except FileNotFoundError:
        raise
    except Exception as exc:
        logger.exception("Failed to read file: {}", path)
        raise RepositoryError(str(exc)) from exc


async def read_text_file(path: str) -> str:
    return (await read_bytes_file(path)).decode("utf-8")
