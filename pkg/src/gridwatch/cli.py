"""Command line front end.

Every operation goes through the HTTP service layer: by default the
service app is driven in-process, and --server URL (or the
GRIDWATCH_SERVER variable; the flag wins) redirects the same calls to a
remote instance. Flags behave identically either way.

Exit codes: 0 success, 1 configuration or input error, 2 one or more
verifier checks failed.
"""

from __future__ import annotations

import asyncio
import json
import os
import sys
from pathlib import Path

import click
import httpx

from . import __version__
from .metrics import write_csv

DEFAULT_OUT = "gridwatch-out"

# keys that mark a config file as a whole sweep rather than a single
# simulation config; the axis keys only count when they hold lists
_SWEEP_AXES = ("n_sensors", "p_fail", "wake_multiplier", "recovery_mode")
_SWEEP_ONLY = ("base", "repeats", "seed_base")


def _request(
    method: str, path: str, payload: dict | None = None,
    server: str | None = None,
) -> httpx.Response:
    if server:
        with httpx.Client(base_url=server, timeout=None) as c:
            return c.request(method, path, json=payload)

    from .service import app

    async def go() -> httpx.Response:
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://gridwatch"
        ) as c:
            return await c.request(method, path, json=payload)

    return asyncio.run(go())


def _deep_merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _deep_merge(out[k], v)
        else:
            out[k] = v
    return out


def _load_config(path: str) -> dict:
    """Read a config file as a sweep spec fragment.

    Accepts either sweep shape (base/axes/repeats) or a flat simulation
    config. A flat config means exactly one run: every axis is pinned to
    the config's own value and its seed becomes the seed base.
    """
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    sweep_shaped = any(k in data for k in _SWEEP_ONLY) or any(
        isinstance(data.get(k), list) for k in _SWEEP_AXES
    )
    if sweep_shaped:
        return data
    from .engine import SimConfig

    cfg = SimConfig(**data)  # validates early, with a readable error
    return {
        "base": data,
        "n_sensors": [cfg.n_sensors],
        "p_fail": [cfg.p_fail],
        "wake_multiplier": [cfg.wake_multiplier],
        "recovery_mode": [cfg.recovery_mode],
        "seed_base": cfg.seed,
    }


def _fail_labels(j: dict) -> list[str]:
    checks = [
        ("rule-budget", j["moves_ok"]),
        ("message-bound", j["msgs_ok"]),
        ("single-worker", j["sigma_ok"]),
        ("single-recoverer", j["recoverer_ok"]),
        ("stutter-flags", j["stutter_mismatches"] == 0),
        ("counters", not j["counter_mismatches"]),
        ("coverage", j["coverage_ok"]),
    ]
    return [name for name, ok in checks if not ok]


def _verify_files(path: Path, server: str | None) -> int:
    if path.is_dir():
        files = sorted(path.glob("*.jsonl"))
        if not files:
            click.echo(f"no .jsonl traces under {path}", err=True)
            return 1
    else:
        files = [path]
    failed = 0
    unreadable = 0
    for f in files:
        try:
            text = f.read_text()
        except OSError as exc:
            click.echo(f"ERROR {f.name}: {exc}")
            unreadable += 1
            continue
        resp = _request("POST", "/verify", {"trace_jsonl": text}, server)
        if resp.status_code != 200:
            detail = resp.json().get("detail", resp.text)
            click.echo(f"ERROR {f.name}: {detail}")
            unreadable += 1
            continue
        j = resp.json()
        bad = _fail_labels(j)
        if bad:
            click.echo(f"FAIL {f.name}: {', '.join(bad)}")
            failed += 1
        else:
            click.echo(f"PASS {f.name}")
    click.echo(
        f"{len(files)} trace(s): {len(files) - failed - unreadable} passed, "
        f"{failed} failed, {unreadable} unreadable"
    )
    if failed:
        return 2
    if unreadable:
        return 1
    return 0


@click.command()
@click.option("--config", "config_path",
              type=click.Path(exists=True, dir_okay=False),
              help="JSON config: a simulation config or a full sweep spec.")
@click.option("--preset", type=click.Choice(["fig-1x", "fig-4x"]),
              help="Packaged experiment grid to start from.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              help=f"Output directory (env GRIDWATCH_OUT, then ./{DEFAULT_OUT}).")
@click.option("--seeds", type=int,
              help="Repeats per grid point (run i uses seed seed_base+i).")
@click.option("--jobs", type=int, help="Worker processes (default 1).")
@click.option("--emit", type=click.Choice(["csv", "jsonl", "both"]),
              default="csv", show_default=True,
              help="What to write under --out.")
@click.option("--verify-only", "verify_path",
              type=click.Path(exists=True),
              help="Verify a trace file or a directory of traces and exit.")
@click.option("--server", help="Remote service base URL "
              "(env GRIDWATCH_SERVER; default runs the service in-process).")
@click.version_option(__version__)
def main(config_path, preset, out_dir, seeds, jobs, emit, verify_path, server):
    """Run packaged sweeps, custom configs, or verify exported traces."""
    server = server or os.environ.get("GRIDWATCH_SERVER")
    try:
        if verify_path:
            sys.exit(_verify_files(Path(verify_path), server))

        if not (preset or config_path):
            click.echo(
                "nothing to do: pass --preset and/or --config, "
                "or --verify-only PATH", err=True,
            )
            sys.exit(1)

        spec: dict = {}
        if preset:
            resp = _request("GET", "/presets", server=server)
            if resp.status_code != 200:
                click.echo(f"could not load presets: {resp.text}", err=True)
                sys.exit(1)
            spec = resp.json()[preset]
        if config_path:
            try:
                spec = _deep_merge(spec, _load_config(config_path))
            except (json.JSONDecodeError, ValueError) as exc:
                click.echo(f"bad config file: {exc}", err=True)
                sys.exit(1)
        if seeds is not None:
            if seeds < 1:
                click.echo("--seeds must be >= 1", err=True)
                sys.exit(1)
            spec["repeats"] = seeds
        if jobs is not None and jobs < 1:
            click.echo("--jobs must be >= 1", err=True)
            sys.exit(1)

        payload = {
            "spec": spec,
            "jobs": jobs if jobs is not None else 1,
            "include_traces": emit != "csv",
        }
        resp = _request("POST", "/sweep", payload, server)
        if resp.status_code != 200:
            detail = resp.json().get("detail", resp.text)
            click.echo(f"sweep rejected: {detail}", err=True)
            sys.exit(1)
        j = resp.json()

        out = Path(out_dir or os.environ.get("GRIDWATCH_OUT") or DEFAULT_OUT)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            click.echo(f"cannot create output directory {out}: {exc}", err=True)
            sys.exit(1)

        header = j["header"]
        if emit in ("csv", "both"):
            write_csv(out / "runs.csv", [[r[h] for h in header] for r in j["rows"]])
        if emit in ("jsonl", "both"):
            for row, text in zip(j["rows"], j["traces"]):
                (out / f"{row['run_id']}.jsonl").write_text(text)

        bad = set(j["failures"])
        for row in j["rows"]:
            mark = "ok" if row["run_id"] not in bad else "VERIFY-FAIL"
            click.echo(
                f"{row['run_id']}  seed={row['seed']:>5} n={row['n_sensors']:>5} "
                f"p={row['p_fail']} {row['recovery_mode']} "
                f"lifetime={row['lifetime']:>11} coverage={row['coverage_rate']} "
                f"[{mark}]"
            )
        click.echo(
            f"{j['total']} run(s), {len(bad)} verifier failure(s); "
            f"output in {out}"
        )
        sys.exit(2 if bad else 0)
    except httpx.HTTPError as exc:
        click.echo(f"service unreachable: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
