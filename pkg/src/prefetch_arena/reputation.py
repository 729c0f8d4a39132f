"""Source repository and per-context reputation bookkeeping.

Each registered source carries one reputation per context, starting at 1.0.
When a prefetched object leaves the cache, every source that suggested it
is rewarded by ``delta * atan(hit_count * confidence)`` in the context the
object was cached under. Unaccessed objects (hit_count 0) and sources that
did not suggest the object (confidence 0) leave reputations untouched.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import IO, TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from prefetch_arena.cache import CacheEntry
    from prefetch_arena.predictors.base import Source

INITIAL_REPUTATION = 1.0

TRAJECTORY_COLUMNS = ("tick", "source", "context", "reputation")


class RepositoryError(ValueError):
    pass


class ReputationTable:
    """Reputation matrix indexed by [source_index][context]."""

    def __init__(self, n_contexts: int):
        if n_contexts < 1:
            raise ValueError("need at least one context")
        self.n_contexts = n_contexts
        self.rows: dict[int, list[float]] = {}
        self.retired: dict[int, list[float]] = {}
        self.trajectory: list[tuple[int, int, int, float]] | None = None

    def add_row(self, index: int, initial: float = INITIAL_REPUTATION) -> None:
        self.rows[index] = [initial] * self.n_contexts

    def retire_row(self, index: int) -> None:
        self.retired[index] = self.rows.pop(index)

    def record_trajectory(self) -> None:
        """Start logging every reputation change as (tick, source, context, value)."""
        self.trajectory = []

    def vector(self, context: int, indices) -> list[float]:
        self._check_context(context)
        return [self.rows[i][context] for i in indices]

    def _check_context(self, context: int) -> None:
        if not 0 <= context < self.n_contexts:
            raise IndexError(f"unknown context {context} (have {self.n_contexts})")

    def write_trajectory(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_COLUMNS)
        for tick, src, ctx, rep in self.trajectory or ():
            w.writerow((tick, src, ctx, repr(rep)))


@dataclass
class SourceRecord:
    source: "Source"
    source_index: int
    # reserved for distance classes; the aggregator contacts every source
    cost: float = 0.0


class SourceRepository:
    """Registered sources keyed by a stable, never-reused index."""

    def __init__(self, n_contexts: int = 2):
        self.n_contexts = n_contexts
        self.records: dict[int, SourceRecord] = {}
        self.reputations = ReputationTable(n_contexts)
        self._next_index = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SourceRecord]:
        return iter(self.records[i] for i in sorted(self.records))

    @property
    def indices(self) -> list[int]:
        return sorted(self.records)

    @property
    def vector_length(self) -> int:
        """Length of per-source confidence vectors (covers retired indices too)."""
        return self._next_index


def register_source(repo: SourceRepository, source: "Source", cost: float = 0.0) -> int:
    for rec in repo.records.values():
        if rec.source is source or rec.source.name == source.name:
            raise RepositoryError(f"source {source.name!r} already registered at index {rec.source_index}")
    index = repo._next_index
    repo._next_index += 1
    repo.records[index] = SourceRecord(source, index, cost)
    repo.reputations.add_row(index)
    return index


def remove_source(repo: SourceRepository, source_index: int) -> None:
    if source_index not in repo.records:
        raise RepositoryError(f"no registered source at index {source_index}")
    del repo.records[source_index]
    repo.reputations.retire_row(source_index)


def get_reputation(table: ReputationTable, source_index: int, context: int) -> float:
    table._check_context(context)
    if source_index not in table.rows:
        raise IndexError(f"no active source at index {source_index}")
    return table.rows[source_index][context]


def reputation_reward(hit_count: int, confidence: float, delta: float) -> float:
    return delta * math.atan(hit_count * confidence)


def update_reputations(table: ReputationTable, entry: "CacheEntry", delta: float, now: int | None = None) -> None:
    if not entry.prefetched:
        raise ValueError(f"object {entry.object} was not prefetched; reputations only learn from prefetches")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"learning rate must lie in (0, 1], got {delta}")
    ctx = entry.context
    table._check_context(ctx)
    if entry.hit_count == 0:
        return
    for i, conf in enumerate(entry.confidences):
        if conf == 0 or i not in table.rows:
            continue
        table.rows[i][ctx] += reputation_reward(entry.hit_count, conf, delta)
        if table.trajectory is not None:
            table.trajectory.append((now if now is not None else -1, i, ctx, table.rows[i][ctx]))
