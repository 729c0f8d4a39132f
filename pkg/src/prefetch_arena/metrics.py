"""Hit ratio, waste ratio and efficiency, and the report row that carries them.

Undefined values are ``None`` in Python and empty cells in CSV, with the
cause spelled out in ``undefined_reason``. Nothing ever renders as NaN.
"""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Optional

REPORT_COLUMNS = (
    "run_id",
    "config_name",
    "w",
    "k",
    "support",
    "confidence",
    "cache_size",
    "delta",
    "prefetch_len",
    "seed",
    "requests",
    "hits",
    "prefetch_hits",
    "prefetched",
    "wasted",
    "hit_ratio_overall",
    "hit_ratio_prefetch",
    "waste_ratio",
    "efficiency",
    "undefined_reason",
)


@dataclass
class MetricsCounters:
    requests: int = 0
    hits: int = 0
    prefetch_hits: int = 0
    prefetched_total: int = 0
    wasted: int = 0
    # prefetched entries that left the cache with at least one hit
    accessed_prefetched: int = 0


def hit_ratio(c: MetricsCounters, scope: str = "overall") -> Optional[float]:
    if scope not in ("overall", "prefetch"):
        raise ValueError(f"scope must be 'overall' or 'prefetch', got {scope!r}")
    if c.requests == 0:
        return None
    return (c.hits if scope == "overall" else c.prefetch_hits) / c.requests


def waste_ratio(c: MetricsCounters) -> Optional[float]:
    if c.prefetched_total == 0:
        return None
    return c.wasted / c.prefetched_total


def efficiency(c: MetricsCounters) -> Optional[float]:
    hr = hit_ratio(c, "prefetch")
    wr = waste_ratio(c)
    if hr is None or wr is None or wr == 0:
        return None
    return hr / wr


def undefined_reason(c: MetricsCounters) -> str:
    if c.requests == 0:
        return "no requests"
    if c.prefetched_total == 0:
        return "no prefetches"
    if c.wasted == 0:
        return "zero waste"
    return ""


def fmt(x) -> str:
    """Deterministic CSV cell text; None becomes an empty cell."""
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.10g}"
    return str(x)


@dataclass
class MetricsReport:
    counters: MetricsCounters
    config_name: str = "framework"
    w: int = 1
    k: int = 1
    support: float = 0.005
    confidence: float = 0.1
    cache_size: int = 30
    delta: float = 0.5
    prefetch_len: int = 3
    seed: int = 0
    run_id: str = "0"
    meta: dict = field(default_factory=dict)

    @property
    def hit_ratio_overall(self):
        return hit_ratio(self.counters, "overall")

    @property
    def hit_ratio_prefetch(self):
        return hit_ratio(self.counters, "prefetch")

    @property
    def waste_ratio(self):
        return waste_ratio(self.counters)

    @property
    def efficiency(self):
        return efficiency(self.counters)

    @property
    def undefined_reason(self) -> str:
        return undefined_reason(self.counters)

    def row(self) -> dict[str, str]:
        c = self.counters
        values = {
            "run_id": self.run_id,
            "config_name": self.config_name,
            "w": self.w,
            "k": self.k,
            "support": self.support,
            "confidence": self.confidence,
            "cache_size": self.cache_size,
            "delta": self.delta,
            "prefetch_len": self.prefetch_len,
            "seed": self.seed,
            "requests": c.requests,
            "hits": c.hits,
            "prefetch_hits": c.prefetch_hits,
            "prefetched": c.prefetched_total,
            "wasted": c.wasted,
            "hit_ratio_overall": self.hit_ratio_overall,
            "hit_ratio_prefetch": self.hit_ratio_prefetch,
            "waste_ratio": self.waste_ratio,
            "efficiency": self.efficiency,
            "undefined_reason": self.undefined_reason,
        }
        return {k: fmt(v) for k, v in values.items()}

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            hit_ratio_overall=self.hit_ratio_overall,
            hit_ratio_prefetch=self.hit_ratio_prefetch,
            waste_ratio=self.waste_ratio,
            efficiency=self.efficiency,
            undefined_reason=self.undefined_reason,
        )
        return d


def write_report_csv(reports: Iterable[MetricsReport], fh: IO[str], header: bool = True) -> None:
    w = csv.DictWriter(fh, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    if header:
        w.writeheader()
    for r in reports:
        w.writerow(r.row())


def report_csv_text(reports: Iterable[MetricsReport]) -> str:
    buf = io.StringIO()
    write_report_csv(reports, buf)
    return buf.getvalue()


def read_report_rows(fh: IO[str]) -> list[dict[str, str]]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
        raise ValueError(f"not a report CSV: columns {reader.fieldnames}")
    return list(reader)
