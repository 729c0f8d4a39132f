import json

import pytest

from prefetch_arena.config import DEFAULTS, SEED_ENV_VAR, ConfigError, load_config, sim_config, sweep_grid
from prefetch_arena.sweep import SweepGrid


def write(tmp_path, doc):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(doc))
    return str(path)


def test_defaults_follow_the_evaluation_tables(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    cfg = load_config()
    assert (cfg["noOfDocs"], cfg["numOfTransactions"], cfg["minTransSize"], cfg["maxTransSize"]) == (20, 10_000, 4, 15)
    grid = sweep_grid(cfg)
    assert grid == SweepGrid()
    assert grid.w == (1, 2, 3, 4) and grid.k == (1, 2, 3, 4)
    assert grid.support == (0.005, 0.01, 0.015, 0.02, 0.025)
    assert grid.confidence == (0.1, 0.3, 0.5, 0.8)
    assert grid.cache_size == (10, 30, 50, 80, 100)
    assert grid.delta == (0.1, 0.3, 0.5, 0.8, 1.0)
    assert grid.p == (1, 3, 7, 10)
    assert cfg["seed"] == 0


def test_unknown_keys_are_rejected(tmp_path):
    with pytest.raises(ConfigError, match="seeed"):
        load_config(write(tmp_path, {"seeed": 3}))


def test_type_and_range_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, {"delta": 2}))
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, {"grid_w": []}))
    with pytest.raises(ConfigError, match="minTransSize"):
        load_config(write(tmp_path, {"minTransSize": 9, "maxTransSize": 5}))
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "bad.json"))


def test_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv(SEED_ENV_VAR, "11")
    assert load_config()["seed"] == 11
    assert load_config(overrides={"seed": 3})["seed"] == 3
    assert load_config(write(tmp_path, {"seed": 5}))["seed"] == 5
    assert load_config(write(tmp_path, {"seed": 5, "p": 7}), {"p": 1, "delta": None}) == {
        **DEFAULTS,
        "seed": 5,
        "p": 1,
    }
    monkeypatch.setenv(SEED_ENV_VAR, "x")
    with pytest.raises(ConfigError):
        load_config()


def test_typed_views(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)
    cfg = load_config(overrides={"sources": ["dg"], "capacity": 10})
    sim = sim_config(cfg)
    assert sim.sources == ("dg",) and sim.capacity == 10
