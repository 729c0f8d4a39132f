"""Flat JSON configuration shared by every CLI subcommand.

Defaults reproduce the evaluation tables: 20 documents, sessions of 4-15
requests, 10,000 sessions, and the full parameter grid. Every key can also be
overridden on the command line with a flag of the same name.
"""

from __future__ import annotations

import json
import os
from typing import Any, Mapping

import jsonschema

from prefetch_arena.datagen import GenConfig
from prefetch_arena.engine import SOURCE_KINDS, SimConfig
from prefetch_arena.sweep import CONFIGURATIONS, SweepGrid

DEFAULT_SEED = 0
SEED_ENV_VAR = "PREFETCH_ARENA_SEED"

DEFAULTS: dict[str, Any] = {
    # workload
    "noOfDocs": 20,
    "numOfTransactions": 10_000,
    "minTransSize": 4,
    "maxTransSize": 15,
    "seed": DEFAULT_SEED,
    # single run
    "capacity": 30,
    "policy": "lru",
    "p": 3,
    "delta": 0.5,
    "sources": list(SOURCE_KINDS),
    "w": 1,
    "k": 1,
    "support": 0.005,
    "confidence": 0.1,
    "training_fraction": 0.8,
    "contexts": 2,
    "config_name": "framework",
    # sweep grid
    "grid_w": [1, 2, 3, 4],
    "grid_k": [1, 2, 3, 4],
    "grid_support": [0.005, 0.01, 0.015, 0.02, 0.025],
    "grid_confidence": [0.1, 0.3, 0.5, 0.8],
    "grid_cache_size": [10, 30, 50, 80, 100],
    "grid_delta": [0.1, 0.3, 0.5, 0.8, 1.0],
    "grid_p": [1, 3, 7, 10],
    "configurations": ["framework", "dg", "ppm", "wmo"],
}

_pos_int = {"type": "integer", "minimum": 1}
_unit = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}


def _list_of(item: dict) -> dict:
    return {"type": "array", "items": item, "minItems": 1}


SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "noOfDocs": _pos_int,
        "numOfTransactions": {"type": "integer", "minimum": 0},
        "minTransSize": _pos_int,
        "maxTransSize": _pos_int,
        "seed": {"type": "integer", "minimum": 0},
        "capacity": _pos_int,
        "policy": {"enum": ["lru", "paper-ratio"]},
        "p": _pos_int,
        "delta": _unit,
        "sources": {"type": "array", "items": {"enum": list(SOURCE_KINDS)}, "uniqueItems": True},
        "w": _pos_int,
        "k": _pos_int,
        "support": _unit,
        "confidence": _unit,
        "training_fraction": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "contexts": _pos_int,
        "config_name": {"type": "string", "minLength": 1},
        "grid_w": _list_of(_pos_int),
        "grid_k": _list_of(_pos_int),
        "grid_support": _list_of(_unit),
        "grid_confidence": _list_of(_unit),
        "grid_cache_size": _list_of(_pos_int),
        "grid_delta": _list_of(_unit),
        "grid_p": _list_of(_pos_int),
        "configurations": {"type": "array", "items": {"enum": list(CONFIGURATIONS)}, "minItems": 1, "uniqueItems": True},
    },
}


class ConfigError(ValueError):
    pass


def validate(doc: Mapping[str, Any]) -> None:
    try:
        jsonschema.validate(dict(doc), SCHEMA)
    except jsonschema.ValidationError as e:
        where = "/".join(map(str, e.absolute_path)) or "<root>"
        raise ConfigError(f"config {where}: {e.message}") from None


def load_config(path: str | os.PathLike | None = None, overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Defaults, then the JSON file, then non-None overrides, then the seed env fallback.

    An explicit ``seed`` override always beats the environment variable.
    """
    doc: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise ConfigError(f"config {path} is not valid JSON: {e}") from None
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        validate(doc)
    merged = {**DEFAULTS, **doc}
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    if "seed" not in overrides and "seed" not in doc and os.environ.get(SEED_ENV_VAR):
        try:
            overrides["seed"] = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer") from None
    merged.update(overrides)
    validate(merged)
    # cross-field checks live on the typed configs
    try:
        gen_config(merged)
        sim_config(merged)
        sweep_grid(merged)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return merged


def gen_config(doc: Mapping[str, Any]) -> GenConfig:
    return GenConfig(doc["noOfDocs"], doc["numOfTransactions"], doc["minTransSize"], doc["maxTransSize"], doc["seed"])


def sim_config(doc: Mapping[str, Any]) -> SimConfig:
    return SimConfig(
        capacity=doc["capacity"],
        policy=doc["policy"],
        p=doc["p"],
        delta=doc["delta"],
        sources=tuple(doc["sources"]),
        w=doc["w"],
        k=doc["k"],
        support=doc["support"],
        confidence=doc["confidence"],
        training_fraction=doc["training_fraction"],
        seed=doc["seed"],
        contexts=doc["contexts"],
        config_name=doc["config_name"],
    )


def sweep_grid(doc: Mapping[str, Any]) -> SweepGrid:
    return SweepGrid(
        w=tuple(doc["grid_w"]),
        k=tuple(doc["grid_k"]),
        support=tuple(doc["grid_support"]),
        confidence=tuple(doc["grid_confidence"]),
        cache_size=tuple(doc["grid_cache_size"]),
        delta=tuple(doc["grid_delta"]),
        p=tuple(doc["grid_p"]),
        configurations=tuple(doc["configurations"]),
    )
