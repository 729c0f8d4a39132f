"""Bounded object cache on a logical clock.

Two eviction policies are available:

``lru``
    evict the entry with the largest ``now - last_hit``. ``last_hit`` starts
    at the caching tick, so freshly stored objects are protected.
``paper-ratio``
    evict the entry with the largest ``(now - cached_on) / max(1, now - last_hit)``.

Ties go to the smallest object id. Prefetched entries are handed to an
eviction hook when they leave, which is where reputations learn.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass
from typing import IO, Callable, Optional

POLICIES = ("lru", "paper-ratio")

EVICTION_COLUMNS = ("tick", "object", "prefetched", "hit_count", "policy_score")

EvictionHook = Callable[["CacheEntry", int], None]


@dataclass
class CacheEntry:
    object: int
    cached_on: int = 0
    last_hit: int = 0
    hit_count: int = 0
    prefetched: bool = False
    context: int = 0
    confidences: tuple[float, ...] = ()


@dataclass(frozen=True)
class CacheConfig:
    capacity: int = 30
    policy: str = "lru"

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"cache capacity must be >= 1, got {self.capacity}")
        if self.policy not in POLICIES:
            raise ValueError(f"unknown eviction policy {self.policy!r}; choose from {POLICIES}")


class Cache:
    def __init__(self, config: CacheConfig = CacheConfig(), on_evict: Optional[EvictionHook] = None):
        self.config = config
        self.capacity = config.capacity
        self.policy = config.policy
        self.on_evict = on_evict
        self.entries: dict[int, CacheEntry] = {}
        self._heap: list[tuple[int, int]] = []
        self.eviction_log: list[tuple[int, int, bool, int, float]] | None = None

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, obj: int) -> bool:
        return obj in self.entries

    def record_evictions(self) -> None:
        self.eviction_log = []

    def snapshot(self) -> dict[int, CacheEntry]:
        return {o: CacheEntry(**vars(e)) for o, e in self.entries.items()}

    def lookup(self, obj: int, now: int) -> CacheEntry | None:
        entry = self.entries.get(obj)
        if entry is None:
            return None
        entry.hit_count += 1
        entry.last_hit = now
        if self.policy == "lru":
            heapq.heappush(self._heap, (now, obj))
        return entry

    def store(self, entry: CacheEntry, now: int, on_evict: Optional[EvictionHook] = None) -> CacheEntry:
        """Insert ``entry`` at tick ``now``, evicting first if the cache is full.

        Re-storing a cached object refreshes its caching tick and prefetch
        metadata in place and keeps its hit count. A prefetched entry is never
        downgraded to an ordinary one, so its eviction hook still fires.
        """
        hook = on_evict if on_evict is not None else self.on_evict
        existing = self.entries.get(entry.object)
        if existing is not None:
            existing.cached_on = now
            existing.last_hit = now
            if entry.prefetched:
                existing.prefetched = True
                existing.context = entry.context
                existing.confidences = tuple(entry.confidences)
            elif not existing.prefetched:
                existing.context = entry.context
            if self.policy == "lru":
                heapq.heappush(self._heap, (now, entry.object))
            return existing
        while len(self.entries) >= self.capacity:
            self.evict_one(now, hook)
        entry.cached_on = now
        entry.last_hit = now
        entry.hit_count = 0
        entry.confidences = tuple(entry.confidences)
        self.entries[entry.object] = entry
        if self.policy == "lru":
            heapq.heappush(self._heap, (now, entry.object))
        return entry

    def _victim(self, now: int) -> tuple[int, float]:
        if self.policy == "lru":
            heap = self._heap
            while heap:
                last_hit, obj = heap[0]
                e = self.entries.get(obj)
                if e is not None and e.last_hit == last_hit:
                    return obj, float(now - last_hit)
                heapq.heappop(heap)
            raise AssertionError("lru heap out of sync with cache entries")
        best_obj, best_score = -1, float("-inf")
        for obj in sorted(self.entries):
            e = self.entries[obj]
            score = (now - e.cached_on) / max(1, now - e.last_hit)
            if score > best_score:
                best_obj, best_score = obj, score
        return best_obj, best_score

    def evict_one(self, now: int, on_evict: Optional[EvictionHook] = None) -> CacheEntry:
        if not self.entries:
            raise LookupError("cannot evict from an empty cache")
        hook = on_evict if on_evict is not None else self.on_evict
        obj, score = self._victim(now)
        if self.policy == "lru":
            heapq.heappop(self._heap)
        entry = self.entries.pop(obj)
        if self.eviction_log is not None:
            self.eviction_log.append((now, obj, entry.prefetched, entry.hit_count, score))
        if entry.prefetched and hook is not None:
            hook(entry, now)
        return entry

    def flush(self, now: int, on_evict: Optional[EvictionHook] = None) -> list[CacheEntry]:
        """Empty the cache in object-id order, firing the hook for prefetched entries."""
        hook = on_evict if on_evict is not None else self.on_evict
        flushed = []
        for obj in sorted(self.entries):
            entry = self.entries.pop(obj)
            if entry.prefetched and hook is not None:
                hook(entry, now)
            flushed.append(entry)
        self._heap.clear()
        return flushed

    def write_eviction_log(self, fh: IO[str]) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(EVICTION_COLUMNS)
        for tick, obj, pre, hits, score in self.eviction_log or ():
            w.writerow((tick, obj, int(pre), hits, repr(score)))
