"""Brute-force reference implementations used to cross-check the predictors.

Nothing here shares code with the package beyond the AccessLog container:
every count is a direct scan of the sessions.
"""

from fractions import Fraction
from itertools import combinations


def dg_oracle(log, w, current, p):
    singles = sum(t.requests.count(current) for t in log)
    if singles == 0:
        return []
    pairs = {}
    for t in log:
        r = t.requests
        for j in range(len(r)):
            if r[j] != current:
                continue
            for i in range(j + 1, min(j + w, len(r) - 1) + 1):
                pairs[r[i]] = pairs.get(r[i], 0) + 1
    scored = [(b, min(100.0, 100.0 * n / singles)) for b, n in pairs.items()]
    return sorted(scored, key=lambda s: (-s[1], s[0]))[:p]


def window_count(log, seq):
    """Occurrences of seq as a contiguous run, summed over sessions."""
    seq = tuple(seq)
    m = len(seq)
    return sum(1 for t in log for j in range(len(t.requests) - m + 1) if t.requests[j : j + m] == seq)


def ppm_oracle(log, k, history, p):
    chosen = {}
    history = tuple(history)
    objects = sorted({o for t in log for o in t.requests})
    for m in range(min(k, len(history)), 0, -1):
        ctx = history[-m:]
        base = window_count(log, ctx)
        if base == 0:
            continue
        level = []
        for c in objects:
            n = window_count(log, ctx + (c,))
            if n:
                level.append((c, 100.0 * n / base))
        level.sort(key=lambda s: (-s[1], s[0]))
        for c, score in level:
            if len(chosen) >= p:
                break
            chosen.setdefault(c, score)
        if len(chosen) >= p:
            break
    return sorted(chosen.items(), key=lambda s: (-s[1], s[0]))[:p]


def ordered_subsequences(requests, max_len):
    """Every ordered subsequence with pairwise-distinct items, up to max_len."""
    out = set()
    for m in range(1, min(max_len, len(requests)) + 1):
        for combo in combinations(requests, m):
            if len(set(combo)) == m:
                out.add(combo)
    return out


def wmo_oracle(log, min_support, min_confidence, max_len=8):
    """Frequent sequences (with counts) and rules (antecedent, consequent) -> (support, confidence).

    Thresholds are compared as exact decimals, so 0.1 means one tenth.
    """
    n = len(log)
    sup_thr = Fraction(str(min_support))
    conf_thr = Fraction(str(min_confidence))
    counts = {}
    for t in log:
        for s in ordered_subsequences(t.requests, max_len):
            counts[s] = counts.get(s, 0) + 1
    frequent = {s: c for s, c in counts.items() if Fraction(c, n) >= sup_thr}
    rules = {}
    for s, c in frequent.items():
        if len(s) < 2:
            continue
        conf = Fraction(c, frequent[s[:-1]])
        if conf >= conf_thr:
            rules[(s[:-1], s[-1])] = (Fraction(c, n), conf)
    return frequent, rules
