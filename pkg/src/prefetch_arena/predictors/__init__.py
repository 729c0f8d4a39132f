from prefetch_arena.predictors.base import Source, StaticSource
from prefetch_arena.predictors.dg import DependencyGraphSource, DgConfig, dg_predict, dg_train
from prefetch_arena.predictors.frequency import FrequencyStore
from prefetch_arena.predictors.ppm import PPMSource, PpmConfig, ppm_predict, ppm_train
from prefetch_arena.predictors.wmo import (
    Rule,
    RuleSet,
    WMOSource,
    WmoConfig,
    wmo_generate_candidates,
    wmo_mine,
    wmo_predict,
)

__all__ = [
    "Source",
    "StaticSource",
    "FrequencyStore",
    "DgConfig",
    "DependencyGraphSource",
    "dg_train",
    "dg_predict",
    "PpmConfig",
    "PPMSource",
    "ppm_train",
    "ppm_predict",
    "WmoConfig",
    "Rule",
    "RuleSet",
    "WMOSource",
    "wmo_generate_candidates",
    "wmo_mine",
    "wmo_predict",
]
