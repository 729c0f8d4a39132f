"""Reputation-weighted merge of the candidate lists of all registered sources.

An object's total confidence is the reputation-weighted sum of the
confidences every source gave it, divided by the number of sources; a source
that did not suggest the object contributes zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Container, Sequence

from prefetch_arena.reputation import ReputationTable, SourceRepository

QUEUE_COLUMNS = ("tick", "rank", "object", "total_confidence")


@dataclass(frozen=True)
class AggregateEntry:
    object: int
    per_source_confidence: tuple[float, ...]
    total_confidence: float


PrefetchQueue = tuple  # tuple[AggregateEntry, ...]


def aggregate_confidence(per_source_confidence: Sequence[float], reputations: Sequence[float], S: int) -> float:
    if S <= 0:
        raise ValueError("cannot aggregate over an empty source repository")
    if len(per_source_confidence) != S or len(reputations) != S:
        raise ValueError(f"expected {S} confidences and reputations")
    return sum(r * c for r, c in zip(reputations, per_source_confidence)) / S


def update_prefetch_queue(
    repo: SourceRepository,
    table: ReputationTable,
    cache_view: Container[int],
    context: int,
    history: Sequence[int],
    p: int,
) -> PrefetchQueue:
    if p < 1:
        raise ValueError(f"prefetch length must be >= 1, got {p}")
    indices = repo.indices
    if not indices:
        return ()
    width = repo.vector_length
    merged: dict[int, list[float]] = {}
    for i in indices:
        for obj, conf in repo.records[i].source.suggest(history, context, p):
            vec = merged.get(obj)
            if vec is None:
                vec = merged[obj] = [0.0] * width
            vec[i] = conf
    reps = table.vector(context, indices)
    S = len(indices)
    entries = []
    for obj, vec in merged.items():
        if obj in cache_view:
            continue
        total = aggregate_confidence([vec[i] for i in indices], reps, S)
        entries.append(AggregateEntry(obj, tuple(vec), total))
    entries.sort(key=lambda e: (-e.total_confidence, e.object))
    return tuple(entries[:p])
