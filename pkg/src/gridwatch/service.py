"""HTTP face of the simulator.

Every operation the CLI exposes goes through here, so a deployment can
serve the same sweeps and verification remotely. Handlers are thin: they
validate shapes, call the core package, and reshape results; no
simulation logic lives in this module.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__
from . import trace as tr
from .engine import SimConfig, Simulation
from .metrics import CSV_HEADER, verify
from .sweep import PRESETS, SweepSpec, run_sweep
from .topology import build_grid, to_json

app = FastAPI(title="gridwatch", version=__version__)


# ---------------------------------------------------------------- models


class TopologyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rows: int = 10
    cols: int = 10
    n_sensors: int = 200
    r_sense: float = 0.75
    r_comm: float = 1.5
    seed: int = 0


class CheckReport(BaseModel):
    """Slimmed verifier verdict: every invariant as one flag or count."""

    ok: bool
    moves_ok: bool
    max_moves: int
    move_bound: int
    max_firings: int
    msgs_ok: bool
    msg_bound: float | None
    msgs_observed: int
    sigma_ok: bool
    recoverer_ok: bool
    stutter_mismatches: int
    counter_mismatches: list[str]
    coverage_ok: bool


def _check_report(rep) -> CheckReport:
    return CheckReport(
        ok=rep.ok,
        moves_ok=rep.moves_ok,
        max_moves=rep.max_moves,
        move_bound=rep.move_bound,
        max_firings=rep.max_firings,
        msgs_ok=rep.msgs_ok,
        msg_bound=rep.msg_bound,
        msgs_observed=rep.msgs_observed,
        sigma_ok=rep.sigma_ok,
        recoverer_ok=rep.recoverer_ok,
        stutter_mismatches=rep.stutter_mismatches,
        counter_mismatches=list(rep.counter_mismatches),
        coverage_ok=rep.coverage_ok,
    )


class SimulateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: SimConfig = Field(default_factory=SimConfig)
    include_trace: bool = False


class SimulateResponse(BaseModel):
    lifetime: float
    horizon: float
    censored: bool
    coverage_rate: float
    recovery_failure_rate: float
    counters: dict[str, int]
    digest: str
    checks: CheckReport
    trace: str | None = None


class SweepRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    spec: SweepSpec | None = None
    preset: str | None = None
    repeats: int = 1
    seed_base: int = 0
    jobs: int = 1
    include_traces: bool = False

    @model_validator(mode="after")
    def _one_source(self):
        if (self.spec is None) == (self.preset is None):
            raise ValueError("provide exactly one of spec or preset")
        return self


class SweepResponse(BaseModel):
    total: int
    header: list[str]
    rows: list[dict[str, str]]
    digests: list[str]
    failures: list[str]
    all_ok: bool
    traces: list[str] | None = None


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    trace_jsonl: str


class VerifyResponse(CheckReport):
    n: int
    m: int
    coverage_recomputed: float


# -------------------------------------------------------------- handlers


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.get("/presets")
def presets() -> dict:
    return {name: make().model_dump() for name, make in PRESETS.items()}


@app.post("/topology")
def topology(req: TopologyRequest) -> dict:
    topo = build_grid(
        rows=req.rows, cols=req.cols, n_sensors=req.n_sensors,
        r_sense=req.r_sense, r_comm=req.r_comm, seed=req.seed,
    )
    return json.loads(to_json(topo))


@app.post("/simulate")
def simulate_endpoint(req: SimulateRequest) -> SimulateResponse:
    res = Simulation(req.config).run()
    rep = verify(res.trace)
    s = res.summary
    return SimulateResponse(
        lifetime=s["lifetime"],
        horizon=s["horizon"],
        censored=s["censored"],
        coverage_rate=s["coverage_rate"],
        recovery_failure_rate=res.recovery_failure_rate,
        counters=dict(s["counters"]),
        digest=tr.digest(res.trace),
        checks=_check_report(rep),
        trace=tr.to_jsonl(res.trace) if req.include_trace else None,
    )


@app.post("/sweep")
def sweep_endpoint(req: SweepRequest) -> SweepResponse:
    if req.preset is not None:
        if req.preset not in PRESETS:
            raise HTTPException(
                status_code=400,
                detail=f"unknown preset {req.preset!r}; have {sorted(PRESETS)}",
            )
        spec = PRESETS[req.preset](repeats=req.repeats, seed_base=req.seed_base)
    else:
        spec = req.spec
    emit = "both" if req.include_traces else "csv"
    report = run_sweep(spec, out_dir=None, jobs=req.jobs, emit=emit)
    traces = None
    if req.include_traces:
        traces = [o.trace_jsonl for o in report.outcomes]
    return SweepResponse(
        total=len(report.outcomes),
        header=list(CSV_HEADER),
        rows=[dict(zip(CSV_HEADER, row)) for row in report.rows],
        digests=[o.digest for o in report.outcomes],
        failures=report.failures,
        all_ok=report.all_ok,
        traces=traces,
    )


@app.post("/verify")
def verify_endpoint(req: VerifyRequest) -> VerifyResponse:
    try:
        trace = tr.from_jsonl(req.trace_jsonl)
        rep = verify(trace)
    except HTTPException:
        raise
    except Exception as exc:  # malformed trace: report, don't 500
        raise HTTPException(status_code=400, detail=f"unreadable trace: {exc}")
    base = _check_report(rep)
    return VerifyResponse(
        **base.model_dump(), n=rep.n, m=rep.m,
        coverage_recomputed=rep.coverage_recomputed,
    )
