import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prefetch_arena.cache import CacheEntry
from prefetch_arena.predictors import StaticSource
from prefetch_arena.reputation import (
    INITIAL_REPUTATION,
    RepositoryError,
    ReputationTable,
    SourceRepository,
    get_reputation,
    register_source,
    remove_source,
    update_reputations,
)


def prefetched(obj, hits, confidences, context=0):
    return CacheEntry(obj, hit_count=hits, prefetched=True, context=context, confidences=tuple(confidences))


def test_register_initializes_every_context_to_one():
    repo = SourceRepository(n_contexts=2)
    idx = register_source(repo, StaticSource("a", {}))
    assert idx == 0
    assert repo.reputations.rows[0] == [1.0, 1.0]
    assert get_reputation(repo.reputations, 0, 1) == INITIAL_REPUTATION


def test_duplicate_registration_is_rejected():
    repo = SourceRepository()
    src = StaticSource("a", {})
    register_source(repo, src)
    with pytest.raises(RepositoryError, match="'a'.*index 0"):
        register_source(repo, src)
    with pytest.raises(RepositoryError):
        register_source(repo, StaticSource("a", {}))


def test_indices_are_never_reused_and_reregistration_resets():
    repo = SourceRepository()
    a, b = StaticSource("a", {}), StaticSource("b", {})
    register_source(repo, a)
    register_source(repo, b)
    repo.reputations.rows[0][0] = 5.0
    remove_source(repo, 0)
    assert len(repo) == 1
    assert repo.reputations.retired[0] == [5.0, 1.0]
    idx = register_source(repo, a)
    assert idx == 2
    assert get_reputation(repo.reputations, idx, 0) == 1.0
    assert repo.indices == [1, 2]
    assert repo.vector_length == 3


def test_remove_unknown_index():
    with pytest.raises(RepositoryError):
        remove_source(SourceRepository(), 3)


def test_get_reputation_bounds():
    repo = SourceRepository(n_contexts=2)
    register_source(repo, StaticSource("a", {}))
    with pytest.raises(IndexError):
        get_reputation(repo.reputations, 0, 2)
    with pytest.raises(IndexError):
        get_reputation(repo.reputations, 4, 0)


def test_worked_example_updates(example_repo):
    table = example_repo.reputations
    # O5 accessed three times, cached under the first context
    update_reputations(table, prefetched(5, 3, [0, 66.9, 87.2, 86.7]), delta=0.5)
    got = [get_reputation(table, i, 0) for i in range(4)]
    assert got == pytest.approx([2.0, 3.18, 1.88, 3.88], abs=0.01)
    # other context untouched
    assert [get_reputation(table, i, 1) for i in range(4)] == [1.0, 1.3, 2.2, 1.2]
    # O2 never accessed: no change at all
    before = [row[:] for row in table.rows.values()]
    update_reputations(table, prefetched(2, 0, [60.1, 61.8, 0, 81.9]), delta=0.5)
    assert [row[:] for row in table.rows.values()] == before


def test_single_update_examples():
    table = ReputationTable(1)
    table.add_row(0, 2.4)
    update_reputations(table, prefetched(1, 3, [66.9]), 0.5)
    assert table.rows[0][0] == pytest.approx(2.4 + 0.5 * math.atan(200.7))
    assert round(table.rows[0][0], 2) == 3.18
    table.rows[0][0] = 3.1
    update_reputations(table, prefetched(1, 3, [86.7]), 0.5)
    assert round(table.rows[0][0], 2) == 3.88


def test_rejects_ordinary_entries_and_bad_rates():
    table = ReputationTable(1)
    table.add_row(0)
    with pytest.raises(ValueError):
        update_reputations(table, CacheEntry(1, hit_count=2), 0.5)
    with pytest.raises(ValueError):
        update_reputations(table, prefetched(1, 1, [10.0]), 0.0)
    with pytest.raises(IndexError):
        update_reputations(table, prefetched(1, 1, [10.0], context=3), 0.5)


def test_retired_rows_do_not_learn():
    repo = SourceRepository(1)
    register_source(repo, StaticSource("a", {}))
    register_source(repo, StaticSource("b", {}))
    remove_source(repo, 0)
    update_reputations(repo.reputations, prefetched(1, 1, [50.0, 50.0]), 1.0)
    assert repo.reputations.retired[0] == [1.0]
    assert repo.reputations.rows[1][0] > 1.0


def test_trajectory_export():
    table = ReputationTable(2)
    table.add_row(0)
    table.record_trajectory()
    update_reputations(table, prefetched(1, 1, [10.0], context=1), 1.0, now=7)
    buf = io.StringIO()
    table.write_trajectory(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "tick,source,context,reputation"
    assert lines[1].startswith("7,0,1,")


@given(
    st.lists(
        st.tuples(
            st.integers(0, 5),
            st.lists(st.sampled_from([0.0, 0.5, 12.0, 66.9, 100.0]), min_size=3, max_size=3),
            st.integers(0, 1),
        ),
        max_size=25,
    ),
    st.sampled_from([0.1, 0.3, 0.5, 0.8, 1.0]),
)
def test_reputation_invariants(events, delta):
    table = ReputationTable(2)
    for i in range(3):
        table.add_row(i)
    for hits, confs, ctx in events:
        before = {i: row[:] for i, row in table.rows.items()}
        update_reputations(table, prefetched(0, hits, confs, ctx), delta)
        for i, row in table.rows.items():
            step = row[ctx] - before[i][ctx]
            assert 0.0 <= step <= delta * math.pi / 2 + 1e-12
            assert row[1 - ctx] == before[i][1 - ctx]
            if confs[i] == 0 or hits == 0:
                assert step == 0.0
