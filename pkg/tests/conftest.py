import random

import pytest
from hypothesis import settings

from prefetch_arena.core import AccessLog, Transaction
from prefetch_arena.predictors import StaticSource
from prefetch_arena.reputation import SourceRepository, register_source

settings.register_profile("repo", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repo")

# Worked example with four sources and two contexts; objects O1..O7 are ids 1..7.
EXAMPLE_REPUTATIONS = [
    (2.0, 1.0),
    (2.4, 1.3),
    (1.1, 2.2),
    (3.1, 1.2),
]
EXAMPLE_SUGGESTIONS = [
    [(3, 85.3), (1, 65.0), (2, 60.1), (4, 54.7), (6, 51.5)],
    [(4, 90.6), (3, 72.3), (5, 66.9), (2, 61.8), (7, 56.4)],
    [(5, 87.2), (4, 85.1), (3, 77.4), (1, 69.2), (6, 52.8)],
    [(3, 98.4), (5, 86.7), (2, 81.9), (4, 75.4), (7, 68.6)],
]


def example_repository():
    repo = SourceRepository(n_contexts=2)
    names = ["news", "medical", "dg", "ppm"]
    for name, sugg, reps in zip(names, EXAMPLE_SUGGESTIONS, EXAMPLE_REPUTATIONS):
        idx = register_source(repo, StaticSource(name, {0: sugg}))
        repo.reputations.rows[idx] = list(reps)
    return repo


@pytest.fixture
def example_repo():
    return example_repository()


def random_small_log(rng: random.Random, max_transactions=6, max_objects=5, max_len=6, repeats=True):
    """A tiny log for oracle comparisons; sessions may repeat objects when asked."""
    n_objects = rng.randint(1, max_objects)
    transactions = []
    for _ in range(rng.randint(1, max_transactions)):
        length = rng.randint(1, max_len if repeats else min(max_len, n_objects))
        if repeats:
            reqs = [rng.randrange(n_objects) for _ in range(length)]
        else:
            reqs = rng.sample(range(n_objects), length)
        transactions.append(Transaction(rng.randrange(2), tuple(reqs)))
    return AccessLog(tuple(transactions)), n_objects


def alternating_log(n_transactions=20, length=6, context=0):
    """Every session alternates 0,1,0,1... (a perfectly predictable walk)."""
    return AccessLog.from_sequences([[i % 2 for i in range(length)] for _ in range(n_transactions)], context)
