# === FILE: cagsr/adapters/repository/config_loader.py ===
"""
Run configuration loading.

Precedence, lowest to highest: schema defaults, the config file (.toml or .json),
`--set dotted.key=value` overrides in the order given, then the explicit `--seed`.
"""
import json
import os
import tomllib
from typing import Any, Dict, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from cagsr.core.models.config import RunConfig
from cagsr.exceptions import ConfigError


def read_config_file(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    ext = os.path.splitext(path)[1].lower()
    try:
        if ext == ".toml":
            with open(path, "rb") as f:
                return tomllib.load(f)
        if ext == ".json":
            with open(path, "r", encoding="utf-8") as f:
                return json.load(f)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    raise ConfigError(f"unsupported config format {ext!r}; use .toml or .json")


def _parse_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def apply_override(tree: Dict[str, Any], assignment: str) -> None:
    """Apply one `dotted.key=value` assignment to a nested dict in place."""
    key, sep, raw = assignment.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    *parents, leaf = key.split(".")
    node = tree
    for part in parents:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"{key}: {part!r} is not a section")
        node = child
    node[leaf] = _parse_value(raw)


def _describe(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"]) or "<root>"
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def load_run_config(
    path: Optional[str] = None,
    overrides: Sequence[str] = (),
    seed: Optional[int] = None,
) -> RunConfig:
    tree: Dict[str, Any] = read_config_file(path) if path else {}
    for assignment in overrides:
        apply_override(tree, assignment)
    if seed is not None:
        tree["seed"] = seed
    try:
        cfg = RunConfig.model_validate(tree)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc
    logger.debug("resolved config seed={} from {}", cfg.seed, path or "defaults")
    return cfg
