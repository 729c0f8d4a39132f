"""Shared domain types, sequence helpers and the plain-text trace format.

Objects are dense integer ids into a document universe and contexts are
small integer labels. A trace file looks like::

    prefetch-trace v1
    0<TAB>3,7,1,12
    1<TAB>5,2,9,14,0
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence

TRACE_HEADER = "prefetch-trace v1"

ObjectId = int
ContextId = int


class TraceFormatError(ValueError):
    """Raised when a trace file cannot be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line: int, path: str | None = None):
        self.line = line
        self.path = path
        where = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Transaction:
    context: ContextId
    requests: tuple[ObjectId, ...]

    def __post_init__(self):
        if self.context < 0:
            raise ValueError(f"context must be non-negative, got {self.context}")
        if any(o < 0 for o in self.requests):
            raise ValueError("object ids must be non-negative")
        # callers may hand in lists
        object.__setattr__(self, "requests", tuple(self.requests))

    def __len__(self) -> int:
        return len(self.requests)


@dataclass(frozen=True)
class AccessLog:
    transactions: tuple[Transaction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "transactions", tuple(self.transactions))

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self) -> Iterator[Transaction]:
        return iter(self.transactions)

    def __getitem__(self, i):
        return self.transactions[i]

    @classmethod
    def from_sequences(cls, seqs: Iterable[Sequence[int]], context: ContextId = 0) -> "AccessLog":
        return cls(tuple(Transaction(context, tuple(s)) for s in seqs))

    @property
    def request_count(self) -> int:
        return sum(len(t) for t in self.transactions)

    def universe_size(self) -> int:
        """One past the largest object id seen (0 for an empty log)."""
        return max((max(t.requests) for t in self.transactions if t.requests), default=-1) + 1


class Suggestion(NamedTuple):
    object: ObjectId
    confidence: float


CandidateList = tuple  # tuple[Suggestion, ...], ordered by rank_suggestions


def suggestion_order(s: Suggestion) -> tuple[float, int]:
    """Sort key: descending confidence, then ascending object id."""
    return (-s.confidence, s.object)


def rank_suggestions(suggestions: Iterable[Suggestion], p: int | None = None) -> CandidateList:
    """Order suggestions canonically, keep the best score per object, truncate to p."""
    best: dict[int, float] = {}
    for obj, conf in suggestions:
        if obj not in best or conf > best[obj]:
            best[obj] = conf
    ranked = sorted((Suggestion(o, c) for o, c in best.items()), key=suggestion_order)
    if p is not None:
        ranked = ranked[:p]
    return tuple(ranked)


def is_subsequence(needle: Sequence, haystack: Sequence) -> bool:
    """True iff needle occurs in haystack in order, gaps allowed."""
    it = iter(haystack)
    return all(any(x == y for y in it) for x in needle)


# ---------------------------------------------------------------------------
# trace files


def format_trace(log: AccessLog) -> str:
    lines = [TRACE_HEADER]
    for t in log:
        lines.append(f"{t.context}\t{','.join(map(str, t.requests))}")
    return "\n".join(lines) + "\n"


def parse_trace(text: str, path: str | None = None) -> AccessLog:
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise TraceFormatError(f"expected header {TRACE_HEADER!r}", 1, path)
    transactions = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        ctx_part, sep, objs_part = raw.partition("\t")
        if not sep:
            raise TraceFormatError("missing TAB between context and objects", lineno, path)
        try:
            context = int(ctx_part)
        except ValueError:
            raise TraceFormatError(f"bad context label {ctx_part!r}", lineno, path) from None
        if context < 0:
            raise TraceFormatError("negative context label", lineno, path)
        if not objs_part:
            raise TraceFormatError("empty transaction", lineno, path)
        try:
            requests = tuple(int(tok) for tok in objs_part.split(","))
        except ValueError:
            raise TraceFormatError(f"bad object list {objs_part!r}", lineno, path) from None
        if any(o < 0 for o in requests):
            raise TraceFormatError("negative object id", lineno, path)
        transactions.append(Transaction(context, requests))
    return AccessLog(tuple(transactions))


def read_trace(path: str | os.PathLike) -> AccessLog:
    with open(path, encoding="utf-8") as fh:
        return parse_trace(fh.read(), str(path))


def write_trace(log: AccessLog, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(log))
