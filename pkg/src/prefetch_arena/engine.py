"""Trace-driven simulation of the request, fetch and prefetch agents.

One tick of the logical clock per client request. On a miss the object is
fetched, appended to the session history, and the prefetch queue is
recomputed and drained immediately. On a hit only the session history and
the entry's hit bookkeeping change.
"""

from __future__ import annotations

import csv
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from prefetch_arena.aggregator import QUEUE_COLUMNS, AggregateEntry, update_prefetch_queue
from prefetch_arena.cache import Cache, CacheConfig, CacheEntry
from prefetch_arena.core import AccessLog, Transaction
from prefetch_arena.metrics import MetricsCounters, MetricsReport
from prefetch_arena.predictors import (
    DependencyGraphSource,
    DgConfig,
    PpmConfig,
    PPMSource,
    Source,
    WmoConfig,
    WMOSource,
)
from prefetch_arena.reputation import SourceRepository, register_source, update_reputations

logger = logging.getLogger(__name__)

SOURCE_KINDS = ("dg", "ppm", "wmo")
REQUEST_ORDERING = "fetch-miss,recompute-queue,drain-prefetches"


class ContextError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    capacity: int = 30
    policy: str = "lru"
    p: int = 3
    delta: float = 0.5
    sources: tuple[str, ...] = SOURCE_KINDS
    w: int = 1
    k: int = 1
    support: float = 0.005
    confidence: float = 0.1
    training_fraction: float = 0.8
    seed: int = 0
    contexts: int = 2
    config_name: str = "framework"

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        CacheConfig(self.capacity, self.policy)
        if self.p < 1:
            raise ValueError(f"prefetch length must be >= 1, got {self.p}")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"learning rate must lie in (0, 1], got {self.delta}")
        if not 0.0 < self.training_fraction < 1.0:
            raise ValueError("training_fraction must lie strictly between 0 and 1")
        if self.contexts < 1:
            raise ValueError("need at least one context")
        unknown = set(self.sources) - set(SOURCE_KINDS)
        if unknown:
            raise ValueError(f"unknown sources {sorted(unknown)}; choose from {SOURCE_KINDS}")
        DgConfig(self.w), PpmConfig(self.k), WmoConfig(self.support, self.confidence)

    @property
    def cache_config(self) -> CacheConfig:
        return CacheConfig(self.capacity, self.policy)

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


def build_source(kind: str, cfg: SimConfig) -> Source:
    if kind == "dg":
        return DependencyGraphSource(DgConfig(cfg.w))
    if kind == "ppm":
        return PPMSource(PpmConfig(cfg.k))
    if kind == "wmo":
        return WMOSource(WmoConfig(cfg.support, cfg.confidence))
    raise ValueError(f"unknown source kind {kind!r}")


def train_sources(cfg: SimConfig, training_log: AccessLog) -> list[Source]:
    if len(training_log) == 0 and cfg.sources:
        raise ValueError("training log is empty")
    sources = []
    for kind in cfg.sources:
        src = build_source(kind, cfg)
        src.train(training_log)
        sources.append(src)
    return sources


class OriginStore:
    """Simulated origin server: every valid object can be fetched."""

    def __init__(self, n_documents: int):
        self.n_documents = n_documents

    def fetch(self, obj: int) -> int:
        if not 0 <= obj < self.n_documents:
            raise KeyError(f"object {obj} outside the document universe of {self.n_documents}")
        return obj


class PassThroughWatchdog:
    """Admits every prefetch immediately; a rate-limiting policy can replace it."""

    def admit(self, queue: Sequence[AggregateEntry], state: "RunState") -> Sequence[AggregateEntry]:
        return queue


@dataclass
class RunTrace:
    """Optional per-run exports (queue trace; reputation and eviction logs live on their owners)."""

    queue: list[tuple[int, int, int, float]] = field(default_factory=list)

    def write_queue(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(QUEUE_COLUMNS)
        for tick, rank, obj, total in self.queue:
            w.writerow((tick, rank, obj, repr(total)))


@dataclass
class RunState:
    config: SimConfig
    cache: Cache
    repo: SourceRepository
    origin: OriginStore
    counters: MetricsCounters = field(default_factory=MetricsCounters)
    clock: int = 0
    queue: tuple = ()
    context: int = 0
    history: list[int] = field(default_factory=list)
    watchdog: PassThroughWatchdog = field(default_factory=PassThroughWatchdog)
    trace: Optional[RunTrace] = None

    @property
    def table(self):
        return self.repo.reputations


def new_run_state(
    cfg: SimConfig, sources: Sequence[Source], n_documents: int, trace: Optional[RunTrace] = None
) -> RunState:
    repo = SourceRepository(cfg.contexts)
    for src in sources:
        register_source(repo, src)
    state = RunState(cfg, Cache(cfg.cache_config), repo, OriginStore(n_documents), trace=trace)
    state.cache.on_evict = lambda entry, now: _on_prefetched_eviction(state, entry, now)
    if trace is not None:
        repo.reputations.record_trajectory()
        state.cache.record_evictions()
    return state


def _on_prefetched_eviction(state: RunState, entry: CacheEntry, now: int) -> None:
    update_reputations(state.table, entry, state.config.delta, now)
    if entry.hit_count == 0:
        state.counters.wasted += 1
    else:
        state.counters.accessed_prefetched += 1


def current_context(transaction: Transaction, n_contexts: int) -> int:
    """Session-level context manager: the label carried by the transaction."""
    if not 0 <= transaction.context < n_contexts:
        raise ContextError(f"context label {transaction.context} outside the {n_contexts} configured contexts")
    return transaction.context


def fetch_agent_fetch(
    state: RunState, obj: int, caller: str = "ordinary", suggestion: Optional[AggregateEntry] = None
) -> CacheEntry:
    if caller not in ("ordinary", "prefetch"):
        raise ValueError(f"caller must be 'ordinary' or 'prefetch', got {caller!r}")
    state.origin.fetch(obj)
    prefetch = caller == "prefetch"
    existing = state.cache.entries.get(obj)
    if prefetch and not (existing is not None and existing.prefetched):
        state.counters.prefetched_total += 1
    stored = state.cache.store(CacheEntry(obj, prefetched=prefetch, context=state.context), state.clock)
    if prefetch:
        prefetch_agent_notify(state, stored, suggestion)
    return stored


def prefetch_agent_notify(state: RunState, entry: CacheEntry, suggestion: Optional[AggregateEntry]) -> None:
    """Attach the caching context and per-source confidences to a prefetched entry."""
    entry.context = state.context
    if suggestion is not None:
        entry.confidences = tuple(suggestion.per_source_confidence)


def prefetch_agent_drain(state: RunState) -> int:
    queue = state.watchdog.admit(state.queue, state)
    for entry in queue:
        fetch_agent_fetch(state, entry.object, "prefetch", entry)
    return len(queue)


def recompute_queue(state: RunState) -> tuple:
    state.queue = update_prefetch_queue(
        state.repo, state.table, state.cache, state.context, state.history, state.config.p
    )
    if state.trace is not None:
        for rank, e in enumerate(state.queue):
            state.trace.queue.append((state.clock, rank, e.object, e.total_confidence))
    return state.queue


def accept_request(state: RunState, obj: int) -> bool:
    """Serve one client request; returns True on a cache hit."""
    state.clock += 1
    state.counters.requests += 1
    entry = state.cache.lookup(obj, state.clock)
    if entry is not None:
        state.counters.hits += 1
        if entry.prefetched:
            state.counters.prefetch_hits += 1
        state.history.append(obj)
        return True
    fetch_agent_fetch(state, obj, "ordinary")
    state.history.append(obj)
    recompute_queue(state)
    prefetch_agent_drain(state)
    return False


def replay(state: RunState, eval_log: AccessLog) -> None:
    for t in eval_log:
        state.context = current_context(t, state.config.contexts)
        state.history = []
        for obj in t.requests:
            accept_request(state, obj)
    state.cache.flush(state.clock)


def run_simulation(
    config: SimConfig,
    training_log: AccessLog,
    eval_log: AccessLog,
    sources: Optional[Sequence[Source]] = None,
    trace: Optional[RunTrace] = None,
    run_id: str = "0",
) -> tuple[MetricsReport, RunState]:
    """Train (unless trained ``sources`` are supplied), replay ``eval_log``, report.

    Returns the report together with the final run state so callers can
    inspect reputations or exports.
    """
    if sources is None:
        sources = train_sources(config, training_log)
    n_docs = max(training_log.universe_size(), eval_log.universe_size())
    state = new_run_state(config, sources, n_docs, trace)
    replay(state, eval_log)
    report = MetricsReport(
        counters=state.counters,
        config_name=config.config_name,
        w=config.w,
        k=config.k,
        support=config.support,
        confidence=config.confidence,
        cache_size=config.capacity,
        delta=config.delta,
        prefetch_len=config.p,
        seed=config.seed,
        run_id=run_id,
        meta={
            "training_fraction": config.training_fraction,
            "request_ordering": REQUEST_ORDERING,
            "policy": config.policy,
            "sources": list(config.sources),
        },
    )
    return report, state


def split_log(log: AccessLog, training_fraction: float, seed: int) -> tuple[AccessLog, AccessLog]:
    """Seeded shuffle followed by a prefix split; both halves are non-empty."""
    if not 0.0 < training_fraction < 1.0:
        raise ValueError("training_fraction must lie strictly between 0 and 1")
    if len(log) < 2:
        raise ValueError("need at least two transactions to split")
    items = list(log.transactions)
    random.Random(f"{seed}/split").shuffle(items)
    cut = min(max(1, round(len(items) * training_fraction)), len(items) - 1)
    return AccessLog(tuple(items[:cut])), AccessLog(tuple(items[cut:]))
