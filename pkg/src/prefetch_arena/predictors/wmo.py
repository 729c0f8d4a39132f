"""WM_O: order-preserving Apriori over sessions, plus rule-based prediction.

A session supports a sequence when the sequence occurs in it as an ordered
subsequence (gaps allowed); each session counts at most once. Every frequent
sequence ``s`` of length >= 2 yields the rule ``s[:-1] => s[-1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from prefetch_arena.core import AccessLog, CandidateList, Suggestion, is_subsequence, rank_suggestions
from prefetch_arena.predictors.base import Source

# float slack when comparing ratios against thresholds such as 0.005
_EPS = 1e-12

Seq = tuple[int, ...]


@dataclass(frozen=True)
class WmoConfig:
    min_support: float = 0.005
    min_confidence: float = 0.1

    def __post_init__(self):
        for label, v in (("min_support", self.min_support), ("min_confidence", self.min_confidence)):
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{label} must lie in (0, 1], got {v}")


@dataclass(frozen=True)
class Rule:
    antecedent: Seq
    consequent: int
    support: float
    confidence: float


class RuleSet:
    def __init__(self, rules: Iterable[Rule] = (), frequent: dict[Seq, int] | None = None, n_transactions: int = 0):
        self.rules = tuple(sorted(rules, key=lambda r: (len(r.antecedent), r.antecedent, r.consequent)))
        # frequent sequence -> supporting transaction count
        self.frequent = dict(frequent or {})
        self.n_transactions = n_transactions
        self._by_antecedent: dict[Seq, list[Rule]] = {}
        for r in self.rules:
            self._by_antecedent.setdefault(r.antecedent, []).append(r)
        self.max_antecedent = max((len(a) for a in self._by_antecedent), default=0)

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def with_min_confidence(self, min_confidence: float) -> "RuleSet":
        return RuleSet(
            (r for r in self.rules if r.confidence + _EPS >= min_confidence), self.frequent, self.n_transactions
        )

    def matching(self, history: tuple[int, ...]) -> list[Rule]:
        """Rules whose antecedent is an ordered subsequence of history."""
        n = len(history)
        n_combos = sum(math.comb(n, m) for m in range(1, min(n, self.max_antecedent) + 1))
        if n_combos > len(self.rules):
            return [r for r in self.rules if is_subsequence(r.antecedent, history)]
        found = []
        seen: set[Seq] = set()
        for m in range(1, min(n, self.max_antecedent) + 1):
            for combo in combinations(history, m):
                if combo in seen:
                    continue
                seen.add(combo)
                found.extend(self._by_antecedent.get(combo, ()))
        return found

    def dump(self) -> str:
        lines = [
            f"{','.join(map(str, r.antecedent))}=>{r.consequent}\t{r.support!r}\t{r.confidence!r}" for r in self.rules
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def _meets(ratio: float, threshold: float) -> bool:
    return ratio + _EPS >= threshold


def wmo_generate_candidates(Lk: Iterable[Seq], F1: Iterable[Seq]) -> set[Seq]:
    """Extend each (k-1)-sequence by one frequent item, keeping only candidates
    whose every (k-1)-subsequence is itself in ``Lk``."""
    Lk = set(map(tuple, Lk))
    items = sorted({s[0] for s in F1})
    candidates: set[Seq] = set()
    for l in Lk:
        for v in items:
            if v in l:
                continue
            c = l + (v,)
            if all(c[:i] + c[i + 1 :] in Lk for i in range(len(c))):
                candidates.add(c)
    return candidates


def wmo_mine(log: AccessLog, cfg: WmoConfig) -> RuleSet:
    n = len(log)
    if n == 0:
        return RuleSet()

    # level 1: item -> first position, per transaction
    item_counts: dict[int, int] = {}
    first_pos: list[dict[Seq, int]] = []
    for t in log:
        pos: dict[Seq, int] = {}
        for i, o in enumerate(t.requests):
            pos.setdefault((o,), i)
        first_pos.append(pos)
        for key in pos:
            item_counts[key[0]] = item_counts.get(key[0], 0) + 1

    frequent: dict[Seq, int] = {(o,): c for o, c in item_counts.items() if _meets(c / n, cfg.min_support)}
    F1 = set(frequent)
    level = set(F1)
    # leftmost embedding end of each frequent sequence in each transaction;
    # extending from the earliest end finds every supporting occurrence
    ends = [{s: e for s, e in pos.items() if s in level} for pos in first_pos]

    while level:
        candidates = wmo_generate_candidates(level, F1)
        if not candidates:
            break
        counts: dict[Seq, int] = {}
        next_ends = []
        for t, prev in zip(log, ends):
            req = t.requests
            found: dict[Seq, int] = {}
            for s, e in prev.items():
                for i in range(e + 1, len(req)):
                    v = req[i]
                    if v in s:
                        continue
                    c = s + (v,)
                    if c in candidates and c not in found:
                        found[c] = i
            for c in found:
                counts[c] = counts.get(c, 0) + 1
            next_ends.append(found)
        level = {c for c, k in counts.items() if _meets(k / n, cfg.min_support)}
        for c in level:
            frequent[c] = counts[c]
        ends = [{c: e for c, e in found.items() if c in level} for found in next_ends]

    rules = []
    for s, count in frequent.items():
        if len(s) < 2:
            continue
        conf = count / frequent[s[:-1]]
        if _meets(conf, cfg.min_confidence):
            rules.append(Rule(s[:-1], s[-1], count / n, conf))
    return RuleSet(rules, frequent, n)


def wmo_predict(rules: RuleSet, history, p: int) -> CandidateList:
    history = tuple(history)
    visited = set(history)
    best: dict[int, Rule] = {}
    for r in rules.matching(history):
        if r.consequent in visited:
            continue
        cur = best.get(r.consequent)
        if cur is None or _rule_rank(r) > _rule_rank(cur):
            best[r.consequent] = r
    return rank_suggestions((Suggestion(o, 100.0 * r.confidence) for o, r in best.items()), p)


def _rule_rank(r: Rule):
    # the negated antecedent makes the final tie-break lexicographically smallest
    return (r.confidence, r.support, len(r.antecedent), tuple(-a for a in r.antecedent))


class WMOSource(Source):
    def __init__(self, cfg: WmoConfig = WmoConfig(), name: str = "wmo", rules: RuleSet | None = None):
        super().__init__()
        self.cfg = cfg
        self.name = name
        self.rules = rules if rules is not None else RuleSet()

    def train(self, log: AccessLog) -> None:
        self.rules = wmo_mine(log, self.cfg)
        self._reset_memo()

    def _predict(self, history, p):
        return wmo_predict(self.rules, history, p)
