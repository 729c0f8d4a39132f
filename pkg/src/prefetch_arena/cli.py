"""Command-line front end: ``generate``, ``run``, ``sweep``, ``summarize`` (and ``dump``).

Data goes to stdout or files; diagnostics go to stderr. Exit status is 0 only
when the requested work completed.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Sequence

from prefetch_arena import __version__
from prefetch_arena.config import DEFAULTS, SEED_ENV_VAR, ConfigError, gen_config, load_config, sim_config, sweep_grid
from prefetch_arena.core import AccessLog, TraceFormatError, read_trace, write_trace
from prefetch_arena.datagen import generate_workload
from prefetch_arena.engine import REQUEST_ORDERING, RunTrace, run_simulation, split_log, train_sources
from prefetch_arena.metrics import read_report_rows, write_report_csv
from prefetch_arena.predictors import DependencyGraphSource, PPMSource, WMOSource
from prefetch_arena.sweep import canonical_param, overall_efficiency, run_sweep, summarize, write_summary_csv

log = logging.getLogger("prefetch_arena")

TRACE_FILES = {
    "context1": "context1.trace",
    "context2": "context2.trace",
    "merged": "merged.trace",
    "train": "train.trace",
    "eval": "eval.trace",
    "graph": "linkgraph.txt",
}


class CliError(Exception):
    def __init__(self, message: str, code: int = 1):
        super().__init__(message)
        self.code = code


def _list_parser(example):
    item_type = type(example[0]) if example else str

    def parse(text: str):
        if text.strip().lower() in ("", "none"):
            return []
        return [item_type(tok) for tok in text.split(",")]

    return parse


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    g = common.add_argument_group("global options")
    g.add_argument("--config", metavar="PATH", help="JSON config file (unknown keys are rejected)")
    g.add_argument("--out", metavar="PATH", help="output file or directory (per subcommand)")
    g.add_argument("--parallel", type=int, metavar="N", help="concurrent sweep cells (default 1)")
    g.add_argument(
        "--param",
        action="append",
        metavar="NAME",
        help="parameter to summarize over (w, k, support, confidence, cache_size, delta, p); repeatable",
    )
    g.add_argument("--quiet", action="store_true", help="only report warnings and errors")
    o = common.add_argument_group("config overrides (same names as the JSON keys)")
    for key, default in DEFAULTS.items():
        if isinstance(default, list):
            o.add_argument(f"--{key}", type=_list_parser(default), metavar="A,B,...", help=f"default {default}")
        else:
            o.add_argument(f"--{key}", type=type(default), metavar=type(default).__name__.upper(), help=f"default {default}")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="prefetch-arena",
        description="Multi-source web prefetching simulator with adaptive per-context reputations.",
        parents=[common],
        epilog=f"Seed precedence: --seed, then ${SEED_ENV_VAR}, then the config file, then {DEFAULTS['seed']}.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", parents=[common], help="generate synthetic traces and the train/eval split")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", parents=[common], help="train the enabled sources and run one simulation")
    p.add_argument("train_trace")
    p.add_argument("eval_trace")
    p.add_argument("--export-dir", metavar="DIR", help="also write queue, reputation and eviction traces here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="run the parameter grid and write report + summary CSVs")
    p.add_argument("traces", nargs="+", help="a directory holding train.trace and eval.trace, or the two files")
    p.add_argument("--no-figures", action="store_true", help="skip rendering efficiency figures")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("summarize", parents=[common], help="min/avg/max efficiency summary of a report CSV")
    p.add_argument("report")
    p.add_argument("--no-figures", action="store_true", help="skip rendering efficiency figures")
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("dump", parents=[common], help="train the sources and write their model dumps")
    p.add_argument("train_trace")
    p.set_defaults(func=cmd_dump)
    return parser


def _config_from(args: argparse.Namespace) -> dict[str, Any]:
    overrides = {key: getattr(args, key, None) for key in DEFAULTS}
    return load_config(getattr(args, "config", None), overrides)


def _ensure_dir(path: str) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise CliError(f"cannot create output directory {path}: {e.strerror}") from None
    if not os.access(path, os.W_OK):
        raise CliError(f"output directory {path} is not writable")
    return path


def _read(path: str) -> AccessLog:
    if not os.path.isfile(path):
        raise CliError(f"trace file not found: {path}")
    return read_trace(path)


def _write_meta(path: str, doc: dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_generate(args, cfg: dict[str, Any]) -> int:
    out = _ensure_dir(getattr(args, "out", None) or "traces")
    gen = gen_config(cfg)
    graph, log1, log2, merged = generate_workload(gen)
    train, evaluation = split_log(merged, cfg["training_fraction"], gen.seed)
    paths = {name: os.path.join(out, fname) for name, fname in TRACE_FILES.items()}
    write_trace(log1, paths["context1"])
    write_trace(log2, paths["context2"])
    write_trace(merged, paths["merged"])
    write_trace(train, paths["train"])
    write_trace(evaluation, paths["eval"])
    with open(paths["graph"], "w", encoding="utf-8") as fh:
        graph.write(fh)
    print(f"context1\t{len(log1)}")
    print(f"context2\t{len(log2)}")
    print(f"merged\t{len(merged)}")
    print(f"train\t{len(train)}")
    print(f"eval\t{len(evaluation)}")
    log.info("wrote traces to %s", out)
    return 0


def cmd_run(args, cfg: dict[str, Any]) -> int:
    train, evaluation = _read(args.train_trace), _read(args.eval_trace)
    sim = sim_config(cfg)
    export_dir = getattr(args, "export_dir", None)
    trace = RunTrace() if export_dir else None
    report, state = run_simulation(sim, train, evaluation, trace=trace)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            write_report_csv([report], fh)
        _write_meta(out + ".meta.json", {**report.meta, "config": cfg})
    else:
        write_report_csv([report], sys.stdout)
    if export_dir:
        _ensure_dir(export_dir)
        with open(os.path.join(export_dir, "queue.csv"), "w", encoding="utf-8", newline="") as fh:
            trace.write_queue(fh)
        with open(os.path.join(export_dir, "reputation.csv"), "w", encoding="utf-8", newline="") as fh:
            state.table.write_trajectory(fh)
        with open(os.path.join(export_dir, "evictions.csv"), "w", encoding="utf-8", newline="") as fh:
            state.cache.write_eviction_log(fh)
    return 0


def _trace_pair(paths: Sequence[str]) -> tuple[AccessLog, AccessLog]:
    if len(paths) == 1:
        if not os.path.isdir(paths[0]):
            raise CliError(f"expected a trace directory or two trace files, got {paths[0]}")
        return _read(os.path.join(paths[0], TRACE_FILES["train"])), _read(os.path.join(paths[0], TRACE_FILES["eval"]))
    if len(paths) == 2:
        return _read(paths[0]), _read(paths[1])
    raise CliError("expected a trace directory or exactly two trace files", 2)


def _summary_outputs(rows, params, out_dir: str | None, figures: bool) -> None:
    summary = summarize(rows, params)
    if out_dir is None:
        write_summary_csv(summary, sys.stdout)
        return
    with open(os.path.join(out_dir, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        write_summary_csv(summary, fh)
    if figures:
        from prefetch_arena.plots import render_summary_figures

        for path in render_summary_figures(summary, os.path.join(out_dir, "figures")):
            log.info("figure %s", path)


def _params(args) -> list[str] | None:
    raw = getattr(args, "param", None)
    if not raw:
        return None
    try:
        return [canonical_param(p) for p in raw]
    except ValueError as e:
        raise CliError(str(e), 2) from None


def cmd_sweep(args, cfg: dict[str, Any]) -> int:
    parallel = getattr(args, "parallel", 1)
    if parallel < 1:
        raise CliError("--parallel must be >= 1", 2)
    params = _params(args)
    train, evaluation = _trace_pair(args.traces)
    out = _ensure_dir(getattr(args, "out", None) or "sweep-out")
    grid = sweep_grid(cfg)
    journal = os.path.join(out, "report.partial.csv")
    log.info("sweep: %d cells x %d configurations", grid.n_cells, len(grid.configurations))

    def progress(n, total):
        if n % 50 == 0 or n == total:
            log.info("  %d/%d distinct simulations done", n, total)

    reports = run_sweep(grid, sim_config(cfg), train, evaluation, parallel=parallel, journal=journal, progress=progress)
    with open(os.path.join(out, "report.csv"), "w", encoding="utf-8", newline="") as fh:
        write_report_csv(reports, fh)
    os.remove(journal)
    _write_meta(
        os.path.join(out, "report.meta.json"),
        {"request_ordering": REQUEST_ORDERING, "training_fraction": cfg["training_fraction"], "config": cfg},
    )
    _summary_outputs(reports, params, out, not getattr(args, "no_figures", False))
    for name, s in overall_efficiency(reports).items():
        avg = "undefined" if s.avg is None else f"{s.avg:.4f}"
        log.info("%-10s avg efficiency %s over %d defined cells (%d undefined)", name, avg, len(s.values), s.undefined)
    return 0


def cmd_summarize(args, cfg: dict[str, Any]) -> int:
    if not os.path.isfile(args.report):
        raise CliError(f"report not found: {args.report}")
    with open(args.report, encoding="utf-8", newline="") as fh:
        try:
            rows = read_report_rows(fh)
        except ValueError as e:
            raise CliError(str(e)) from None
    out = getattr(args, "out", None)
    if out:
        _ensure_dir(out)
    _summary_outputs(rows, _params(args), out, not getattr(args, "no_figures", False))
    return 0


def cmd_dump(args, cfg: dict[str, Any]) -> int:
    train = _read(args.train_trace)
    out = _ensure_dir(getattr(args, "out", None) or "models")
    sim = sim_config(cfg)
    for src in train_sources(sim, train):
        path = os.path.join(out, f"{src.name}.txt")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            if isinstance(src, (DependencyGraphSource, PPMSource)):
                fh.write(src.store.dump())
            elif isinstance(src, WMOSource):
                fh.write(src.rules.dump())
        print(path)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
        format="%(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = _config_from(args)
        return args.func(args, cfg)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except TraceFormatError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
