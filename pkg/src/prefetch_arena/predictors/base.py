from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Mapping, Sequence

from prefetch_arena.core import AccessLog, CandidateList, ContextId, Suggestion, rank_suggestions


class Source(ABC):
    """A prediction source: train once on an access log, then suggest objects.

    ``suggest`` returns at most ``p`` suggestions ordered by descending
    confidence (0-100 scale), ties broken by ascending object id.
    """

    name: str = "source"

    def __init__(self):
        self._memo: dict = {}

    @abstractmethod
    def train(self, log: AccessLog) -> None:
        ...

    @abstractmethod
    def _predict(self, history: Sequence[int], p: int) -> CandidateList:
        ...

    def memo_key(self, history: Sequence[int]):
        """Part of the history the prediction depends on; used for memoization."""
        return tuple(history)

    def suggest(self, history: Sequence[int], context: ContextId, p: int) -> CandidateList:
        # history-based sources ignore context; the reputation layer specializes them
        if p < 1:
            raise ValueError(f"prefetch length must be >= 1, got {p}")
        key = (self.memo_key(history), p)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._predict(history, p)
        return hit

    def _reset_memo(self) -> None:
        self._memo.clear()

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class StaticSource(Source):
    """Returns a fixed candidate list per context regardless of history.

    Stands in for sources whose model lives outside the simulator (for
    example a content-based recommender shipped with the site).
    """

    def __init__(self, name: str, suggestions: Mapping[ContextId, Sequence[tuple[int, float]]]):
        super().__init__()
        self.name = name
        self._by_context = {
            ctx: tuple(Suggestion(o, float(c)) for o, c in items) for ctx, items in suggestions.items()
        }

    def train(self, log: AccessLog) -> None:
        pass

    def _predict(self, history, p):  # pragma: no cover - suggest is overridden
        raise NotImplementedError

    def suggest(self, history: Sequence[int], context: ContextId, p: int) -> CandidateList:
        return rank_suggestions(self._by_context.get(context, ()), p)
