from __future__ import annotations

from collections import defaultdict
from typing import Sequence


class FrequencyStore:
    """Counts of ordered object sequences, with a successor index for lookups."""

    def __init__(self):
        self.counts: dict[tuple[int, ...], int] = defaultdict(int)
        self._successors: dict[tuple[int, ...], dict[int, int]] | None = None

    def increment(self, seq: Sequence[int]) -> None:
        self.counts[tuple(seq)] += 1
        self._successors = None

    def count(self, seq: Sequence[int]) -> int:
        return self.counts.get(tuple(seq), 0)

    def successors(self, prefix: Sequence[int]) -> dict[int, int]:
        """Map of next object -> count(prefix + next)."""
        if self._successors is None:
            index: dict[tuple[int, ...], dict[int, int]] = defaultdict(dict)
            for key, n in self.counts.items():
                if len(key) >= 2:
                    index[key[:-1]][key[-1]] = n
            self._successors = dict(index)
        return self._successors.get(tuple(prefix), {})

    def __len__(self) -> int:
        return len(self.counts)

    def __eq__(self, other) -> bool:
        return isinstance(other, FrequencyStore) and dict(self.counts) == dict(other.counts)

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return dict(self.counts)

    def dump(self) -> str:
        """Sorted ``seq<TAB>count`` lines; shorter sequences first."""
        lines = [
            f"{','.join(map(str, key))}\t{n}"
            for key, n in sorted(self.counts.items(), key=lambda kv: (len(kv[0]), kv[0]))
        ]
        return "\n".join(lines) + ("\n" if lines else "")
