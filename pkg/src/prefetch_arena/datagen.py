"""Seeded synthetic workloads for two navigation regimes.

Context 0 follows a random directed link graph: each session starts from a
random document (not itself recorded) and walks to random unvisited
out-neighbours. Context 1 picks each next document uniformly from the whole
site. Sessions never repeat a document.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import IO

from prefetch_arena.core import AccessLog, Transaction

CONTEXT_LINKED = 0
CONTEXT_RANDOM = 1

# retries per step before a walk gives up, as a multiple of the out-degree
_RETRY_FACTOR = 10
# regenerated walks allowed per requested transaction before giving up
_MAX_ATTEMPTS_PER_TRANSACTION = 1000


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class GenConfig:
    noOfDocs: int = 20
    numOfTransactions: int = 10_000
    minTransSize: int = 4
    maxTransSize: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.noOfDocs < 1:
            raise ValueError("noOfDocs must be positive")
        if self.numOfTransactions < 0:
            raise ValueError("numOfTransactions must be non-negative")
        if self.minTransSize < 1:
            raise ValueError("minTransSize must be positive")
        if self.minTransSize > self.maxTransSize:
            raise ValueError(f"minTransSize ({self.minTransSize}) exceeds maxTransSize ({self.maxTransSize})")
        if self.maxTransSize >= self.noOfDocs:
            raise ValueError(
                f"maxTransSize ({self.maxTransSize}) must be below noOfDocs ({self.noOfDocs}) "
                "so sessions can avoid repeats"
            )
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


@dataclass(frozen=True)
class LinkGraph:
    out_edges: tuple[tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.out_edges)

    def in_degrees(self) -> list[int]:
        deg = [0] * len(self.out_edges)
        for targets in self.out_edges:
            for t in targets:
                deg[t] += 1
        return deg

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.out_edges[a]

    def dump(self) -> str:
        return "".join(f"{src}: {','.join(map(str, dst))}\n" for src, dst in enumerate(self.out_edges))

    def write(self, fh: IO[str]) -> None:
        fh.write(self.dump())

    @classmethod
    def parse(cls, text: str) -> "LinkGraph":
        edges = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            src, sep, rest = line.partition(":")
            if not sep or int(src) != lineno - 1:
                raise ValueError(f"line {lineno}: expected '{lineno - 1}: dst,...'")
            rest = rest.strip()
            edges.append(tuple(int(x) for x in rest.split(",")) if rest else ())
        return cls(tuple(edges))


def _rng(cfg: GenConfig, stream: str) -> random.Random:
    return random.Random(f"{cfg.seed}/{stream}")


def build_link_graph(n_docs: int, rng: random.Random) -> LinkGraph:
    out: list[list[int]] = []
    for i in range(n_docs):
        degree = rng.randint(1, n_docs - 1) if n_docs > 1 else 0
        targets: list[int] = []
        while len(targets) < degree:
            d = rng.randrange(n_docs)
            if d == i or d in targets:
                continue
            targets.append(d)
        out.append(targets)
    if n_docs > 1:
        incoming = [0] * n_docs
        for targets in out:
            for t in targets:
                incoming[t] += 1
        by_degree = sorted(range(n_docs), key=lambda d: (-len(out[d]), d))
        for i in range(n_docs):
            if incoming[i] == 0:
                hub = next(d for d in by_degree if d != i)
                out[hub].append(i)
                incoming[i] += 1
    return LinkGraph(tuple(tuple(t) for t in out))


def _random_walk(graph: LinkGraph, length: int, rng: random.Random) -> list[int]:
    current = rng.randrange(len(graph))
    walk: list[int] = []
    while len(walk) < length:
        neighbours = graph.out_edges[current]
        for _ in range(_RETRY_FACTOR * len(neighbours)):
            nxt = neighbours[rng.randrange(len(neighbours))]
            if nxt not in walk:
                break
        else:
            break
        walk.append(nxt)
        current = nxt
    return walk


def generate_context1(cfg: GenConfig) -> tuple[LinkGraph, AccessLog]:
    """Hyperlink random walks; returns the link graph with the sessions."""
    rng = _rng(cfg, "context-1")
    graph = build_link_graph(cfg.noOfDocs, rng)
    transactions = []
    budget = _MAX_ATTEMPTS_PER_TRANSACTION * max(1, cfg.numOfTransactions)
    while len(transactions) < cfg.numOfTransactions:
        budget -= 1
        if budget < 0:
            raise GenerationError("link graph too sparse to produce sessions of the minimum length")
        length = rng.randint(cfg.minTransSize, cfg.maxTransSize)
        walk = _random_walk(graph, length, rng)
        if len(walk) >= cfg.minTransSize:
            transactions.append(Transaction(CONTEXT_LINKED, tuple(walk)))
    return graph, AccessLog(tuple(transactions))


def generate_context2(cfg: GenConfig) -> AccessLog:
    """Unconstrained navigation: distinct uniformly random documents per session."""
    rng = _rng(cfg, "context-2")
    transactions = []
    for _ in range(cfg.numOfTransactions):
        length = rng.randint(cfg.minTransSize, cfg.maxTransSize)
        session: list[int] = []
        while len(session) < length:
            d = rng.randrange(cfg.noOfDocs)
            if d not in session:
                session.append(d)
        transactions.append(Transaction(CONTEXT_RANDOM, tuple(session)))
    return AccessLog(tuple(transactions))


def merge_logs(log1: AccessLog, log2: AccessLog, seed: int) -> AccessLog:
    """Uniformly random interleave that keeps each log's internal order."""
    rng = random.Random(f"{seed}/merge")
    a, b = list(log1), list(log2)
    i = j = 0
    merged = []
    while i < len(a) or j < len(b):
        remaining_a, remaining_b = len(a) - i, len(b) - j
        if rng.randrange(remaining_a + remaining_b) < remaining_a:
            merged.append(a[i])
            i += 1
        else:
            merged.append(b[j])
            j += 1
    return AccessLog(tuple(merged))


def generate_workload(cfg: GenConfig) -> tuple[LinkGraph, AccessLog, AccessLog, AccessLog]:
    """Both contexts with the transaction budget split evenly, plus their merge."""
    half = cfg.numOfTransactions // 2
    graph, log1 = generate_context1(GenConfig(cfg.noOfDocs, half, cfg.minTransSize, cfg.maxTransSize, cfg.seed))
    log2 = generate_context2(
        GenConfig(cfg.noOfDocs, cfg.numOfTransactions - half, cfg.minTransSize, cfg.maxTransSize, cfg.seed)
    )
    return graph, log1, log2, merge_logs(log1, log2, cfg.seed)
