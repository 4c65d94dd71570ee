"""End-to-end CLI behaviour through click's test runner.

The CLI talks to the service app in-process here (GRIDWATCH_SERVER is
never set in these tests), so this also exercises the HTTP layer.
"""

import json

import pytest
from click.testing import CliRunner

from gridwatch import trace as tr
from gridwatch.cli import main

TINY_SWEEP = {
    "base": {
        "rows": 2, "cols": 2, "lambda_base": 1.0,
        "t_max": 6.0, "trace_mode": "full",
    },
    "n_sensors": [10],
    "p_fail": [0.0, 0.05],
    "repeats": 2,
    "seed_base": 3,
}


@pytest.fixture
def runner():
    return CliRunner()


def _all_output(result) -> str:
    err = ""
    try:
        err = result.stderr
    except ValueError:
        pass
    return result.output + err


def test_bare_invocation_is_an_error(runner):
    result = runner.invoke(main, [])
    assert result.exit_code == 1
    assert "nothing to do" in _all_output(result)


def test_config_sweep_writes_csv(runner, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(TINY_SWEEP))
    out = tmp_path / "out"
    result = runner.invoke(main, ["--config", str(cfg), "--out", str(out)])
    assert result.exit_code == 0, _all_output(result)
    lines = (out / "runs.csv").read_text().splitlines()
    assert len(lines) == 1 + 4
    assert lines[1].startswith("run-0000,3,")  # seed_base honoured
    assert "4 run(s), 0 verifier failure(s)" in result.output


def test_repeated_runs_produce_identical_csv(runner, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(TINY_SWEEP))
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert runner.invoke(
            main, ["--config", str(cfg), "--out", str(out)]
        ).exit_code == 0
        outs.append((out / "runs.csv").read_bytes())
    assert outs[0] == outs[1]


def test_flat_config_becomes_single_run(runner, tmp_path):
    flat = dict(TINY_SWEEP["base"], n_sensors=9, seed=21)
    cfg = tmp_path / "one.json"
    cfg.write_text(json.dumps(flat))
    out = tmp_path / "out"
    result = runner.invoke(main, ["--config", str(cfg), "--out", str(out)])
    assert result.exit_code == 0, _all_output(result)
    lines = (out / "runs.csv").read_text().splitlines()
    assert len(lines) == 2
    # a flat config pins every axis and keeps its own seed
    assert lines[1].split(",")[1] == "21"
    assert lines[1].split(",")[2] == "9"


def test_seeds_flag_overrides_repeats(runner, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(dict(TINY_SWEEP, repeats=1)))
    out = tmp_path / "out"
    result = runner.invoke(
        main, ["--config", str(cfg), "--out", str(out), "--seeds", "3"]
    )
    assert result.exit_code == 0
    assert len((out / "runs.csv").read_text().splitlines()) == 1 + 6


def test_emit_both_writes_traces(runner, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(dict(TINY_SWEEP, p_fail=[0.05], repeats=1)))
    out = tmp_path / "out"
    result = runner.invoke(
        main, ["--config", str(cfg), "--out", str(out), "--emit", "both"]
    )
    assert result.exit_code == 0
    assert (out / "runs.csv").exists()
    blob = (out / "run-0000.jsonl").read_text()
    assert tr.from_jsonl(blob).summary["lifetime"] > 0


def test_env_out_dir_used_when_flag_absent(runner, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(dict(TINY_SWEEP, p_fail=[0.0], repeats=1)))
    envdir = tmp_path / "from-env"
    flagdir = tmp_path / "from-flag"
    env = {"GRIDWATCH_OUT": str(envdir)}
    assert runner.invoke(main, ["--config", str(cfg)], env=env).exit_code == 0
    assert (envdir / "runs.csv").exists()
    # explicit flag wins over the environment
    assert runner.invoke(
        main, ["--config", str(cfg), "--out", str(flagdir)], env=env
    ).exit_code == 0
    assert (flagdir / "runs.csv").exists()


def test_preset_merges_with_config_overrides(runner, tmp_path):
    shrink = {"base": {"t_max": 4.0}, "n_sensors": [16], "p_fail": [0.08]}
    cfg = tmp_path / "shrink.json"
    cfg.write_text(json.dumps(shrink))
    out = tmp_path / "out"
    result = runner.invoke(
        main,
        ["--preset", "fig-4x", "--config", str(cfg), "--out", str(out)],
    )
    assert result.exit_code == 0, _all_output(result)
    lines = (out / "runs.csv").read_text().splitlines()
    assert len(lines) == 1 + 2  # one density, one p, both recovery modes
    for row in lines[1:]:
        cells = row.split(",")
        assert cells[4] == "4.000000"  # preset's wake multiplier survived
    assert {r.split(",")[5] for r in lines[1:]} == {"sum", "xor"}


def test_unknown_preset_name_is_rejected_by_click(runner):
    result = runner.invoke(main, ["--preset", "fig-9x"])
    assert result.exit_code == 2  # click usage error, not a verifier failure
    assert "Invalid value" in _all_output(result)


def test_bad_config_json_exits_one(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{truncated")
    result = runner.invoke(main, ["--config", str(cfg)])
    assert result.exit_code == 1
    assert "bad config file" in _all_output(result)


def test_invalid_spec_reported_as_config_error(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"n_sensors": [], "p_fail": [0.0]}))
    result = runner.invoke(main, ["--config", str(cfg)])
    assert result.exit_code == 1
    assert "sweep rejected" in _all_output(result)


def _make_traces(runner, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps(dict(TINY_SWEEP, p_fail=[0.05], repeats=2)))
    out = tmp_path / "traces"
    assert runner.invoke(
        main, ["--config", str(cfg), "--out", str(out), "--emit", "jsonl"]
    ).exit_code == 0
    return out


def test_verify_only_passes_clean_directory(runner, tmp_path):
    out = _make_traces(runner, tmp_path)
    result = runner.invoke(main, ["--verify-only", str(out)])
    assert result.exit_code == 0
    assert result.output.count("PASS") == 2


def test_verify_only_fails_on_tampered_trace(runner, tmp_path):
    out = _make_traces(runner, tmp_path)
    victim = sorted(out.glob("*.jsonl"))[0]
    doctored = []
    for ln in victim.read_text().splitlines():
        d = json.loads(ln)
        if "counters" in d:
            d["counters"]["wakeups_total"] += 1
        doctored.append(json.dumps(d, sort_keys=True, separators=(",", ":")))
    victim.write_text("\n".join(doctored))
    result = runner.invoke(main, ["--verify-only", str(out)])
    assert result.exit_code == 2
    assert "FAIL" in result.output and "counters" in result.output


def test_verify_only_reports_unreadable_file(runner, tmp_path):
    bad = tmp_path / "junk.jsonl"
    bad.write_text("not a trace\n")
    result = runner.invoke(main, ["--verify-only", str(bad)])
    assert result.exit_code == 1
    assert "ERROR" in result.output


def test_server_flag_routes_to_remote(runner, tmp_path):
    # unroutable address: proves the flag switches transports
    cfg = tmp_path / "one.json"
    cfg.write_text(json.dumps(TINY_SWEEP))
    result = runner.invoke(
        main,
        ["--config", str(cfg), "--server", "http://127.0.0.1:1"],
    )
    assert result.exit_code == 1
    assert "service unreachable" in _all_output(result)
