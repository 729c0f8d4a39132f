import csv
import io
import json

import pytest

from prefetch_arena.cli import build_parser, main
from prefetch_arena.config import DEFAULTS, SEED_ENV_VAR

SMALL = ["--numOfTransactions", "100", "--noOfDocs", "12", "--minTransSize", "3", "--maxTransSize", "8"]
GRID = [
    "--grid_w", "1,2", "--grid_k", "1", "--grid_support", "0.05", "--grid_confidence", "0.3",
    "--grid_cache_size", "3", "--grid_delta", "0.5", "--grid_p", "2",
]  # fmt: skip


@pytest.fixture(autouse=True)
def _no_env_seed(monkeypatch):
    monkeypatch.delenv(SEED_ENV_VAR, raising=False)


@pytest.fixture
def traces(tmp_path, capsys):
    out = tmp_path / "traces"
    assert main(["generate", "--quiet", "--out", str(out), *SMALL]) == 0
    capsys.readouterr()
    return out


def test_help_lists_every_flag(capsys):
    for cmd in ([], ["sweep"]):
        with pytest.raises(SystemExit):
            main([*cmd, "--help"])
        text = capsys.readouterr().out
        for key in DEFAULTS:
            assert f"--{key}" in text
        for flag in ("--config", "--seed", "--out", "--parallel", "--param", "--quiet"):
            assert flag in text


def test_generate_writes_files_and_counts(traces, capsys):
    names = sorted(p.name for p in traces.iterdir())
    assert names == ["context1.trace", "context2.trace", "eval.trace", "linkgraph.txt", "merged.trace", "train.trace"]
    assert main(["generate", "--quiet", "--out", str(traces.parent / "again"), *SMALL]) == 0
    counts = dict(line.split("\t") for line in capsys.readouterr().out.splitlines())
    assert counts == {"context1": "50", "context2": "50", "merged": "100", "train": "80", "eval": "20"}


def test_generate_is_deterministic_per_seed(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["generate", "--quiet", "--seed", "7", "--out", str(tmp_path / name), *SMALL]) == 0
    for f in ("merged.trace", "linkgraph.txt", "train.trace"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_seed_env_fallback_and_flag_precedence(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(SEED_ENV_VAR, "7")
    main(["generate", "--quiet", "--out", str(tmp_path / "env"), *SMALL])
    main(["generate", "--quiet", "--seed", "7", "--out", str(tmp_path / "flag"), *SMALL])
    main(["generate", "--quiet", "--seed", "0", "--out", str(tmp_path / "zero"), *SMALL])
    env = (tmp_path / "env" / "merged.trace").read_bytes()
    assert env == (tmp_path / "flag" / "merged.trace").read_bytes()
    assert env != (tmp_path / "zero" / "merged.trace").read_bytes()


def test_invalid_config_exits_with_usage_error(tmp_path, capsys):
    rc = main(["generate", "--out", str(tmp_path), "--minTransSize", "9", "--maxTransSize", "5"])
    captured = capsys.readouterr()
    assert rc == 2
    assert "minTransSize" in captured.err and captured.out == ""
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["generate", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_unwritable_output_fails(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--quiet", "--out", str(blocker / "sub"), *SMALL]) != 0
    assert "error" in capsys.readouterr().err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_run_emits_one_row(traces, capsys):
    train, ev = str(traces / "train.trace"), str(traces / "eval.trace")
    assert main(["run", "--quiet", train, ev, "--sources", "dg", "--config_name", "dg"]) == 0
    dg = _rows(capsys.readouterr().out)
    assert main(["run", "--quiet", train, ev]) == 0
    fw = _rows(capsys.readouterr().out)
    assert len(dg) == len(fw) == 1
    assert dg[0]["requests"] == fw[0]["requests"]
    assert (dg[0]["config_name"], fw[0]["config_name"]) == ("dg", "framework")


def test_run_without_sources_prefetches_nothing(traces, capsys):
    assert main(["run", "--quiet", str(traces / "train.trace"), str(traces / "eval.trace"), "--sources", "none"]) == 0
    (row,) = _rows(capsys.readouterr().out)
    assert row["prefetched"] == "0"
    assert row["efficiency"] == "" and row["undefined_reason"] == "no prefetches"


def test_run_exports(traces, tmp_path, capsys):
    out = tmp_path / "r.csv"
    args = ["run", "--quiet", str(traces / "train.trace"), str(traces / "eval.trace"), "--capacity", "3"]
    assert main([*args, "--out", str(out), "--export-dir", str(tmp_path / "ex")]) == 0
    assert capsys.readouterr().out == ""
    assert len(_rows(out.read_text())) == 1
    meta = json.loads((tmp_path / "r.csv.meta.json").read_text())
    assert meta["request_ordering"] == "fetch-miss,recompute-queue,drain-prefetches"
    assert meta["training_fraction"] == 0.8
    for name in ("queue.csv", "reputation.csv", "evictions.csv"):
        assert (tmp_path / "ex" / name).read_text().count("\n") > 1


def test_missing_and_malformed_traces(traces, tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.trace"), str(traces / "eval.trace")]) == 1
    assert "not found" in capsys.readouterr().err
    bad = tmp_path / "bad.trace"
    bad.write_text("prefetch-trace v1\n0\t1,2\n0\t1;2\n")
    assert main(["run", str(bad), str(traces / "eval.trace")]) == 1
    assert f"{bad}:3" in capsys.readouterr().err


def test_sweep_writes_reports_summary_and_figures(traces, tmp_path, capsys):
    out = tmp_path / "sw"
    rc = main(["sweep", "--quiet", str(traces), "--out", str(out), "--param", "w", *GRID])
    assert rc == 0
    assert capsys.readouterr().out == ""
    rows = _rows((out / "report.csv").read_text())
    assert len(rows) == 2 * 4
    summary = _rows((out / "summary.csv").read_text())
    assert {(r["varied_param"], r["value"]) for r in summary} == {("w", "1"), ("w", "2")}
    assert (out / "figures" / "efficiency_by_w.png").exists()
    assert not (out / "report.partial.csv").exists()
    assert json.loads((out / "report.meta.json").read_text())["training_fraction"] == 0.8


def test_sweep_is_reproducible_and_accepts_file_pair(traces, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["sweep", "--quiet", str(traces), "--out", str(a), "--no-figures", *GRID])
    files = [str(traces / "train.trace"), str(traces / "eval.trace")]
    main(["sweep", "--quiet", *files, "--out", str(b), "--no-figures", "--parallel", "2", *GRID])
    assert (a / "report.csv").read_bytes() == (b / "report.csv").read_bytes()


def test_sweep_argument_errors(traces, tmp_path, capsys):
    assert main(["sweep", "--quiet", str(traces / "train.trace"), "--out", str(tmp_path)]) == 1
    assert main(["sweep", "--quiet", str(traces), "--param", "alpha", "--out", str(tmp_path)]) == 2
    assert main(["sweep", "--quiet", str(traces), "--parallel", "0", "--out", str(tmp_path), *GRID]) == 2


def test_summarize_to_stdout(traces, tmp_path, capsys):
    out = tmp_path / "sw"
    main(["sweep", "--quiet", str(traces), "--out", str(out), "--no-figures", *GRID])
    capsys.readouterr()
    assert main(["summarize", "--quiet", str(out / "report.csv"), "--param", "cache_size"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert {r["config_name"] for r in rows} == {"framework", "dg", "ppm", "wmo"}
    assert main(["summarize", str(tmp_path / "missing.csv")]) == 1
    (tmp_path / "x.csv").write_text("a,b\n")
    assert main(["summarize", str(tmp_path / "x.csv")]) == 1


def test_dump_models(traces, tmp_path, capsys):
    assert main(["dump", "--quiet", str(traces / "train.trace"), "--out", str(tmp_path / "m"), "--support", "0.05"]) == 0
    assert sorted(p.name for p in (tmp_path / "m").iterdir()) == ["dg.txt", "ppm.txt", "wmo.txt"]
    assert "=>" in (tmp_path / "m" / "wmo.txt").read_text()


def test_parser_has_all_subcommands():
    text = build_parser().format_help()
    for cmd in ("generate", "run", "sweep", "summarize"):
        assert cmd in text
