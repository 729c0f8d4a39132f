"""Dependency Graph source.

Counts each object and every ordered pair (a, b) where b follows a within a
look-ahead window of ``w`` requests. The confidence that b follows a is
``100 * F(a, b) / F(a)``.
"""

from __future__ import annotations

from dataclasses import dataclass

from prefetch_arena.core import AccessLog, CandidateList, Suggestion, rank_suggestions
from prefetch_arena.predictors.base import Source
from prefetch_arena.predictors.frequency import FrequencyStore


@dataclass(frozen=True)
class DgConfig:
    w: int = 1

    def __post_init__(self):
        if self.w < 1:
            raise ValueError(f"look-ahead window must be >= 1, got {self.w}")


def dg_train(log: AccessLog, cfg: DgConfig, store: FrequencyStore | None = None) -> FrequencyStore:
    store = store if store is not None else FrequencyStore()
    for t in log:
        seq = t.requests
        n = len(seq)
        for j in range(n):
            store.increment((seq[j],))
            for i in range(j + 1, min(j + cfg.w, n - 1) + 1):
                store.increment((seq[j], seq[i]))
    return store


def dg_predict(store: FrequencyStore, current: int, p: int) -> CandidateList:
    base = store.count((current,))
    if base == 0:
        return ()
    # repeated objects inside one session can push a pair count past the
    # singleton count; cap so the score stays a percentage
    return rank_suggestions(
        (Suggestion(b, min(100.0, 100.0 * n / base)) for b, n in store.successors((current,)).items()),
        p,
    )


class DependencyGraphSource(Source):
    def __init__(self, cfg: DgConfig = DgConfig(), name: str = "dg"):
        super().__init__()
        self.cfg = cfg
        self.name = name
        self.store = FrequencyStore()

    def train(self, log: AccessLog) -> None:
        self.store = dg_train(log, self.cfg)
        self._reset_memo()

    def memo_key(self, history):
        return history[-1] if history else None

    def _predict(self, history, p):
        if not history:
            return ()
        return dg_predict(self.store, history[-1], p)
