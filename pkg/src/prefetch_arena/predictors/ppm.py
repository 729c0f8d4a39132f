"""Prediction-by-Partial-Matching source.

Training counts every contiguous run of length 1..k+1. Prediction tries the
longest session suffix first and falls back to shorter ones until ``p``
distinct candidates have been found; a candidate keeps the score of the
highest order that proposed it.
"""

from __future__ import annotations

from dataclasses import dataclass

from prefetch_arena.core import AccessLog, CandidateList, Suggestion, rank_suggestions
from prefetch_arena.predictors.base import Source
from prefetch_arena.predictors.frequency import FrequencyStore


@dataclass(frozen=True)
class PpmConfig:
    k: int = 1

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"PPM order must be >= 1, got {self.k}")


def ppm_train(log: AccessLog, cfg: PpmConfig, store: FrequencyStore | None = None) -> FrequencyStore:
    store = store if store is not None else FrequencyStore()
    for t in log:
        seq = t.requests
        n = len(seq)
        for j in range(n):
            store.increment(seq[j : j + 1])
            for i in range(j + 1, min(j + cfg.k, n - 1) + 1):
                store.increment(seq[j : i + 1])
    return store


def ppm_predict(store: FrequencyStore, history, p: int, k: int) -> CandidateList:
    history = tuple(history)
    chosen: dict[int, float] = {}
    for m in range(min(k, len(history)), 0, -1):
        ctx = history[-m:]
        base = store.count(ctx)
        if base == 0:
            continue
        level = rank_suggestions(Suggestion(c, 100.0 * n / base) for c, n in store.successors(ctx).items())
        for obj, conf in level:
            if len(chosen) >= p:
                break
            chosen.setdefault(obj, conf)
        if len(chosen) >= p:
            break
    return rank_suggestions((Suggestion(o, c) for o, c in chosen.items()), p)


class PPMSource(Source):
    def __init__(self, cfg: PpmConfig = PpmConfig(), name: str = "ppm"):
        super().__init__()
        self.cfg = cfg
        self.name = name
        self.store = FrequencyStore()

    def train(self, log: AccessLog) -> None:
        self.store = ppm_train(log, self.cfg)
        self._reset_memo()

    def memo_key(self, history):
        return tuple(history[-self.cfg.k :])

    def _predict(self, history, p):
        return ppm_predict(self.store, history, p, self.cfg.k)
