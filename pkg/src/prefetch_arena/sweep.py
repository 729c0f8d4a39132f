"""Parameter sweeps: framework vs. each standalone source over a value grid.

Cells are enumerated in a fixed canonical order and every (cell, configuration)
pair gets a stable ``run_id``. Runs that are provably identical (a standalone
source does not depend on the other sources' parameters, and with a single
source the learning rate cannot change the ranking) are simulated once and
their counters reused. Trained models are shared across cells.
"""

from __future__ import annotations

import csv
import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from statistics import fmean
from typing import IO, Iterable, Iterator, Optional, Sequence

from prefetch_arena.core import AccessLog
from prefetch_arena.engine import SimConfig, build_source, run_simulation
from prefetch_arena.metrics import REPORT_COLUMNS, MetricsCounters, MetricsReport, fmt, write_report_csv
from prefetch_arena.predictors import Source, WmoConfig, WMOSource, wmo_mine

logger = logging.getLogger(__name__)

CONFIGURATIONS = {
    "framework": ("dg", "ppm", "wmo"),
    "dg": ("dg",),
    "ppm": ("ppm",),
    "wmo": ("wmo",),
    "baseline": (),
}

# grid field -> (SimConfig field, report column)
GRID_PARAMS = {
    "w": ("w", "w"),
    "k": ("k", "k"),
    "support": ("support", "support"),
    "confidence": ("confidence", "confidence"),
    "cache_size": ("capacity", "cache_size"),
    "delta": ("delta", "delta"),
    "p": ("p", "prefetch_len"),
}

PARAM_ALIASES = {"cache": "cache_size", "capacity": "cache_size", "prefetch_len": "p", "prefetch_length": "p"}

SUMMARY_COLUMNS = ("varied_param", "value", "config_name", "min_eff", "avg_eff", "max_eff", "undefined_cells")


def canonical_param(name: str) -> str:
    name = PARAM_ALIASES.get(name, name)
    if name not in GRID_PARAMS:
        raise ValueError(f"unknown sweep parameter {name!r}; choose from {sorted(GRID_PARAMS)}")
    return name


@dataclass(frozen=True)
class SweepGrid:
    w: tuple[int, ...] = (1, 2, 3, 4)
    k: tuple[int, ...] = (1, 2, 3, 4)
    support: tuple[float, ...] = (0.005, 0.01, 0.015, 0.02, 0.025)
    confidence: tuple[float, ...] = (0.1, 0.3, 0.5, 0.8)
    cache_size: tuple[int, ...] = (10, 30, 50, 80, 100)
    delta: tuple[float, ...] = (0.1, 0.3, 0.5, 0.8, 1.0)
    p: tuple[int, ...] = (1, 3, 7, 10)
    configurations: tuple[str, ...] = ("framework", "dg", "ppm", "wmo")

    def __post_init__(self):
        for f in fields(self):
            value = tuple(getattr(self, f.name))
            if not value:
                raise ValueError(f"sweep grid list {f.name!r} is empty")
            object.__setattr__(self, f.name, value)
        unknown = set(self.configurations) - set(CONFIGURATIONS)
        if unknown:
            raise ValueError(f"unknown configurations {sorted(unknown)}; choose from {sorted(CONFIGURATIONS)}")

    def cells(self) -> Iterator[dict]:
        names = list(GRID_PARAMS)
        for values in itertools.product(*(getattr(self, n) for n in names)):
            yield dict(zip(names, values))

    @property
    def n_cells(self) -> int:
        n = 1
        for name in GRID_PARAMS:
            n *= len(getattr(self, name))
        return n

    @property
    def n_runs(self) -> int:
        return self.n_cells * len(self.configurations)


@dataclass(frozen=True)
class RunSpec:
    run_id: str
    config: SimConfig


def expand(grid: SweepGrid, base: SimConfig) -> list[RunSpec]:
    specs = []
    idx = 0
    for cell in grid.cells():
        changes = {GRID_PARAMS[name][0]: value for name, value in cell.items()}
        for name in grid.configurations:
            cfg = base.with_(config_name=name, sources=CONFIGURATIONS[name], **changes)
            specs.append(RunSpec(f"{idx:07d}", cfg))
            idx += 1
    return specs


def effective_key(cfg: SimConfig) -> tuple:
    """Parameters a run's counters can actually depend on."""
    per_source = {"dg": ("w", cfg.w), "ppm": ("k", cfg.k), "wmo": ("wmo", cfg.support, cfg.confidence)}
    key = [
        tuple(per_source[s] for s in cfg.sources),
        cfg.capacity,
        cfg.policy,
        cfg.p,
        cfg.contexts,
    ]
    # one source: scaling its reputation cannot reorder its own queue
    key.append(cfg.delta if len(cfg.sources) > 1 else None)
    return tuple(key)


class ModelCache:
    """Trains each distinct source model once per training log."""

    def __init__(self, training_log: AccessLog, min_confidence: float = 0.1):
        self.training_log = training_log
        self.min_confidence = min_confidence
        self._models: dict[tuple, Source] = {}
        self._mined: dict[float, object] = {}

    def get(self, kind: str, cfg: SimConfig) -> Source:
        if kind == "dg":
            key = ("dg", cfg.w)
        elif kind == "ppm":
            key = ("ppm", cfg.k)
        else:
            key = ("wmo", cfg.support, cfg.confidence)
        src = self._models.get(key)
        if src is None:
            if kind == "wmo":
                floor = min(self.min_confidence, cfg.confidence)
                mined = self._mined.get((cfg.support, floor))
                if mined is None:
                    mined = self._mined[(cfg.support, floor)] = wmo_mine(
                        self.training_log, WmoConfig(cfg.support, floor)
                    )
                src = WMOSource(WmoConfig(cfg.support, cfg.confidence), rules=mined.with_min_confidence(cfg.confidence))
            else:
                src = build_source(kind, cfg)
                src.train(self.training_log)
            self._models[key] = src
        return src

    def sources_for(self, cfg: SimConfig) -> list[Source]:
        return [self.get(kind, cfg) for kind in cfg.sources]


def _run_one(models: ModelCache, eval_log: AccessLog, cfg: SimConfig) -> MetricsCounters:
    report, _ = run_simulation(cfg, models.training_log, eval_log, sources=models.sources_for(cfg))
    return report.counters


# worker-process state for parallel sweeps
_WORKER: dict = {}


def _worker_init(training_log: AccessLog, eval_log: AccessLog, min_confidence: float) -> None:
    _WORKER["models"] = ModelCache(training_log, min_confidence)
    _WORKER["eval"] = eval_log


def _worker_run(cfg: SimConfig) -> MetricsCounters:
    return _run_one(_WORKER["models"], _WORKER["eval"], cfg)


def _report_for(spec: RunSpec, counters: MetricsCounters) -> MetricsReport:
    c = spec.config
    return MetricsReport(
        counters=MetricsCounters(**vars(counters)),
        config_name=c.config_name,
        w=c.w,
        k=c.k,
        support=c.support,
        confidence=c.confidence,
        cache_size=c.capacity,
        delta=c.delta,
        prefetch_len=c.p,
        seed=c.seed,
        run_id=spec.run_id,
    )


def _echo(spec: RunSpec) -> dict[str, str]:
    row = _report_for(spec, MetricsCounters()).row()
    return {k: row[k] for k in REPORT_COLUMNS[:10]}


def _drop_torn_tail(path: str | os.PathLike) -> None:
    """Cut a half-written last line left behind by an interrupted sweep."""
    with open(path, "rb+") as fh:
        data = fh.read()
        if data and not data.endswith(b"\n"):
            fh.truncate(data.rfind(b"\n") + 1)


def load_journal(path: str | os.PathLike) -> dict[str, dict[str, str]]:
    if not os.path.exists(path):
        return {}
    _drop_torn_tail(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is not None and tuple(reader.fieldnames) != REPORT_COLUMNS:
            raise ValueError(f"{path} is not a sweep journal")
        return {row["run_id"]: row for row in reader}


def _counters_from_row(row: dict[str, str]) -> MetricsCounters:
    prefetched = int(row["prefetched"])
    wasted = int(row["wasted"])
    return MetricsCounters(
        requests=int(row["requests"]),
        hits=int(row["hits"]),
        prefetch_hits=int(row["prefetch_hits"]),
        prefetched_total=prefetched,
        wasted=wasted,
        accessed_prefetched=prefetched - wasted,
    )


def run_sweep(
    grid: SweepGrid,
    base_config: SimConfig,
    training_log: AccessLog,
    eval_log: AccessLog,
    parallel: int = 1,
    journal: Optional[str | os.PathLike] = None,
    progress: Optional[callable] = None,
) -> list[MetricsReport]:
    """Run every (cell, configuration) pair; reports come back ordered by run_id.

    With ``journal`` set, each finished run is appended to that CSV as soon as
    it completes, and runs already present there are not simulated again.
    """
    specs = expand(grid, base_config)
    done = load_journal(journal) if journal else {}
    counters: dict[str, MetricsCounters] = {}
    for spec in specs:
        row = done.get(spec.run_id)
        if row is None:
            continue
        if any(row[k] != v for k, v in _echo(spec).items()):
            raise ValueError(f"journal row {spec.run_id} does not match this sweep's grid; use a fresh output")
        counters[spec.run_id] = _counters_from_row(row)

    pending: dict[tuple, list[RunSpec]] = {}
    for spec in specs:
        if spec.run_id not in counters:
            pending.setdefault(effective_key(spec.config), []).append(spec)
    unique = [group[0].config for group in pending.values()]
    logger.info("sweep: %d runs, %d already journaled, %d distinct simulations", len(specs), len(counters), len(unique))

    journal_fh: Optional[IO[str]] = None
    if journal:
        fresh = not os.path.exists(journal) or os.path.getsize(journal) == 0
        journal_fh = open(journal, "a", encoding="utf-8", newline="")
        if fresh:
            write_report_csv([], journal_fh)

    def results() -> Iterable[MetricsCounters]:
        min_conf = min(grid.confidence)
        if parallel > 1 and len(unique) > 1:
            with ProcessPoolExecutor(parallel, initializer=_worker_init, initargs=(training_log, eval_log, min_conf)) as ex:
                yield from ex.map(_worker_run, unique, chunksize=max(1, len(unique) // (parallel * 8)))
        else:
            models = ModelCache(training_log, min_conf)
            for cfg in unique:
                yield _run_one(models, eval_log, cfg)

    try:
        for n, (group, result) in enumerate(zip(pending.values(), results()), start=1):
            for spec in group:
                counters[spec.run_id] = result
            if journal_fh is not None:
                write_report_csv((_report_for(s, result) for s in group), journal_fh, header=False)
                journal_fh.flush()
            if progress is not None:
                progress(n, len(unique))
    finally:
        if journal_fh is not None:
            journal_fh.close()
    return [_report_for(spec, counters[spec.run_id]) for spec in specs]


# ---------------------------------------------------------------------------
# summaries


def _num(text: str) -> float:
    return float(text)


@dataclass
class EfficiencySummary:
    values: list[float] = field(default_factory=list)
    undefined: int = 0

    def add(self, eff: str) -> None:
        if eff == "":
            self.undefined += 1
        else:
            self.values.append(float(eff))

    @property
    def min(self):
        return min(self.values) if self.values else None

    @property
    def avg(self):
        return fmean(self.values) if self.values else None

    @property
    def max(self):
        return max(self.values) if self.values else None


def _as_rows(reports) -> list[dict[str, str]]:
    return [r.row() if isinstance(r, MetricsReport) else r for r in reports]


def summarize(reports, params: Sequence[str] | None = None) -> list[dict[str, str]]:
    """min/avg/max efficiency per (parameter value, configuration), marginalizing
    over every other grid parameter. Undefined cells are counted, not averaged."""
    rows = _as_rows(reports)
    params = [canonical_param(p) for p in (params or GRID_PARAMS)]
    configs = list(dict.fromkeys(r["config_name"] for r in rows))
    out = []
    for param in params:
        column = GRID_PARAMS[param][1]
        groups: dict[tuple[float, str], EfficiencySummary] = {}
        for r in rows:
            groups.setdefault((_num(r[column]), r["config_name"]), EfficiencySummary()).add(r["efficiency"])
        for value in sorted({v for v, _ in groups}):
            for name in configs:
                s = groups.get((value, name))
                if s is None:
                    continue
                out.append(
                    {
                        "varied_param": param,
                        "value": fmt(value if column in ("support", "confidence", "delta") else int(value)),
                        "config_name": name,
                        "min_eff": fmt(s.min),
                        "avg_eff": fmt(s.avg),
                        "max_eff": fmt(s.max),
                        "undefined_cells": str(s.undefined),
                    }
                )
    return out


def overall_efficiency(reports) -> dict[str, EfficiencySummary]:
    """Per-configuration efficiency over every cell of a sweep."""
    out: dict[str, EfficiencySummary] = {}
    for r in _as_rows(reports):
        out.setdefault(r["config_name"], EfficiencySummary()).add(r["efficiency"])
    return out


def write_summary_csv(summary: Iterable[dict[str, str]], fh: IO[str]) -> None:
    w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(summary)


def read_summary_csv(fh: IO[str]) -> list[dict[str, str]]:
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != SUMMARY_COLUMNS:
        raise ValueError(f"not a summary CSV: columns {reader.fieldnames}")
    return list(reader)
