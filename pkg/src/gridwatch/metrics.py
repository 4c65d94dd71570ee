"""Trace verification and summary extraction.

Everything here re-derives its answers from the raw trace records rather
than trusting the engine's own bookkeeping: the replay below maintains an
independent copy of node states, episodes, and per-cell worker counts, so a
bug that corrupts the engine's counters cannot also hide the corruption.

Checked properties:
  - convergence bound: within every inter-failure stretch of a trace, rule
    firings that change anything (a firing in an already settled cell is a
    stutter, not progress) number at most 2n;
  - message bound: probe+reply traffic never exceeds n*m*max_i(t_i/delta_i),
    with t_i the node's observed lifetime and delta_i its smallest drawn
    sleep;
  - settlement safety: whenever a cell has no open probe window and no open
    recovery obligation, it has exactly one alive working member;
  - single recoverer: each lost word is attempted by at most one node.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

from .protocol import NodeState
from .trace import Trace

_W = NodeState.WORKING.value
_P = NodeState.PROBING.value
_S = NodeState.SLEEPING.value
_F = NodeState.FAILED.value


@dataclass
class SegmentStats:
    start: float
    end: float
    firings: int  # every r1/r2/r3 execution
    moves: int  # firings in cells that were not already settled


@dataclass
class VerifyReport:
    n: int
    m: int
    segments: list[SegmentStats]
    max_firings: int
    max_moves: int
    move_bound: int
    moves_ok: bool
    msg_bound: float | None
    msgs_observed: int
    msgs_ok: bool
    nodes_without_sleep: int
    sigma_violations: list[tuple[float, int]]  # (time, zone)
    sigma_ok: bool
    multi_recoverer: list[int]
    recoverer_ok: bool
    stutter_mismatches: int
    counter_mismatches: list[str]
    coverage_recomputed: float
    coverage_ok: bool

    @property
    def ok(self) -> bool:
        return (
            self.moves_ok
            and self.msgs_ok
            and self.sigma_ok
            and self.recoverer_ok
            and self.stutter_mismatches == 0
            and not self.counter_mismatches
            and self.coverage_ok
        )


class _Replay:
    """Independent state machine fed only by header + records."""

    def __init__(self, trace: Trace):
        h = trace.header
        self.n = h["n"]
        self.m = h["m"]
        self.zones = {int(u): list(ms) for u, ms in h["zones"].items()}
        self.zone_of = {}
        for u, ms in self.zones.items():
            for i in ms:
                self.zone_of[i] = u
        self.state = {int(i): s for i, s in h["initial_states"].items()}
        self.alive = {i: s != _F for i, s in self.state.items()}
        self.episodes: set[int] = set()
        self.launched: set[int] = set()  # zones that have ever held a worker
        self.workers = {u: 0 for u in self.zones}
        # coverage only counts until the network dies; a run that kept
        # simulating past that point has records beyond the cap
        self.cov_cap = trace.summary.get("lifetime", float("inf"))
        self.cov_start: dict[int, float] = {}
        self.cov_time = {u: 0.0 for u in self.zones}
        for i, s in self.state.items():
            if s == _W:
                self._work_on(i, 0.0)

    def _work_on(self, i: int, t: float) -> None:
        z = self.zone_of[i]
        if self.workers[z] == 0:
            self.cov_start[z] = min(t, self.cov_cap)
        self.workers[z] += 1
        self.launched.add(z)

    def _work_off(self, i: int, t: float) -> None:
        z = self.zone_of[i]
        self.workers[z] -= 1
        if self.workers[z] == 0:
            self.cov_time[z] += min(t, self.cov_cap) - self.cov_start.pop(z)

    def settled(self, z: int) -> bool:
        open_ep = any(f in self.episodes for f in self.zones[z])
        return self.workers[z] == 1 and not open_ep

    def zone_quiet(self, z: int) -> bool:
        # no open probe window and no open obligation
        for i in self.zones[z]:
            if self.alive[i] and self.state[i] == _P:
                return False
            if i in self.episodes:
                return False
        return True

    def apply(self, rec: dict) -> None:
        kind = rec["kind"]
        t = rec["t"]
        i = rec.get("node")
        if kind == "wake":
            self.state[i] = _P
        elif kind == "rule":
            rule = rec["rule"]
            if rule == "r1":
                self.state[i] = _S
            elif rule == "r2":
                self.state[i] = _W
                self._work_on(i, t)
            elif rule == "r3":
                self.state[i] = _S
                self._work_off(i, t)
        elif kind == "death":
            if self.state[i] == _W:
                self._work_off(i, t)
            self.state[i] = _F
            self.alive[i] = False
            if rec["episode"]:
                self.episodes.add(i)
        elif kind == "recovery":
            self.episodes.discard(rec["failed"])

    def close_coverage(self, t_end: float) -> float:
        for z in sorted(self.cov_start):
            self.cov_time[z] += min(t_end, self.cov_cap) - self.cov_start[z]
        self.cov_start.clear()
        if t_end <= 0:
            return 0.0
        return sum(self.cov_time.values()) / (self.m * t_end)


def message_bound(trace: Trace) -> tuple[float | None, int]:
    """Traffic bound n*m*max_i(t_i/delta_i) and the node count it skipped."""
    h = trace.header
    nodes = trace.summary.get("nodes", {})
    worst = None
    skipped = 0
    for _, (t_i, dmin, _e, _d) in sorted(nodes.items()):
        if dmin is None or dmin <= 0:
            skipped += 1
            continue
        ratio = t_i / dmin
        if worst is None or ratio > worst:
            worst = ratio
    if worst is None:
        return None, skipped
    return h["n"] * h["m"] * worst, skipped


def verify(trace: Trace) -> VerifyReport:
    rp = _Replay(trace)
    counters = trace.summary.get("counters", {})
    lifetime = trace.summary.get("lifetime", 0.0)

    segments: list[SegmentStats] = []
    seg_start = 0.0
    firings = 0
    moves = 0
    stutter_mismatch = 0
    sigma_violations: list[tuple[float, int]] = []
    recoverers: dict[int, int] = {}
    probe_count = 0
    reply_count = 0
    recovery_records = 0
    recovery_failed_records = 0

    recs = trace.records
    idx = 0
    while idx < len(recs):
        # batch all records at one timestamp, then judge settlement; a
        # takeover and its same-instant step-downs are one atomic step
        t = recs[idx]["t"]
        touched: set[int] = set()
        j = idx
        while j < len(recs) and recs[j]["t"] == t:
            rec = recs[j]
            kind = rec["kind"]
            if kind == "wake":
                probe_count += 1
                reply_count += rec["replies"]
                touched.add(rp.zone_of[rec["node"]])
            elif kind == "rule":
                z = rp.zone_of[rec["node"]]
                touched.add(z)
                was_settled = rp.settled(z)
                if bool(rec["stutter"]) != was_settled:
                    stutter_mismatch += 1
                firings += 1
                if not was_settled:
                    moves += 1
            elif kind == "death":
                touched.add(rp.zone_of[rec["node"]])
                segments.append(SegmentStats(seg_start, t, firings, moves))
                seg_start = t
                firings = 0
                moves = 0
            elif kind == "recovery":
                recovery_records += 1
                if not rec["ok"]:
                    recovery_failed_records += 1
                f = rec["failed"]
                recoverers[f] = recoverers.get(f, 0) + 1
                touched.add(rp.zone_of[rec["node"]])
            rp.apply(rec)
            j += 1
        idx = j
        for z in sorted(touched):
            if z not in rp.launched or not rp.zone_quiet(z):
                continue
            alive_members = [i for i in rp.zones[z] if rp.alive[i]]
            if not alive_members:
                continue
            working = sum(1 for i in alive_members if rp.state[i] == _W)
            if working != 1:
                sigma_violations.append((t, z))

    segments.append(SegmentStats(seg_start, lifetime, firings, moves))

    move_bound = 2 * rp.n
    max_firings = max(s.firings for s in segments)
    max_moves = max(s.moves for s in segments)

    bound, skipped = message_bound(trace)
    observed = counters.get("msgs_probe", 0) + counters.get("msgs_reply", 0)
    msgs_ok = True if bound is None else observed <= bound

    multi = sorted(f for f, k in recoverers.items() if k > 1)

    mism: list[str] = []
    if counters.get("msgs_probe") != probe_count:
        mism.append("msgs_probe")
    if counters.get("msgs_reply") != reply_count:
        mism.append("msgs_reply")
    if counters.get("wakeups_total") != probe_count:
        mism.append("wakeups_total")
    if counters.get("recovery_attempts") != recovery_records:
        mism.append("recovery_attempts")
    if counters.get("recovery_failures") != recovery_failed_records:
        mism.append("recovery_failures")

    cov = rp.close_coverage(lifetime)
    cov_claimed = trace.summary.get("coverage_rate", 0.0)
    coverage_ok = abs(cov - cov_claimed) <= 1e-9

    return VerifyReport(
        n=rp.n,
        m=rp.m,
        segments=segments,
        max_firings=max_firings,
        max_moves=max_moves,
        move_bound=move_bound,
        moves_ok=max_moves <= move_bound,
        msg_bound=bound,
        msgs_observed=observed,
        msgs_ok=msgs_ok,
        nodes_without_sleep=skipped,
        sigma_violations=sigma_violations,
        sigma_ok=not sigma_violations,
        multi_recoverer=multi,
        recoverer_ok=not multi,
        stutter_mismatches=stutter_mismatch,
        counter_mismatches=mism,
        coverage_recomputed=cov,
        coverage_ok=coverage_ok,
    )


def coverage_from_trace(trace: Trace) -> float:
    """Coverage recomputed purely from records, over [0, lifetime]."""
    rp = _Replay(trace)
    for rec in trace.records:
        rp.apply(rec)
    return rp.close_coverage(trace.summary.get("lifetime", 0.0))


# --------------------------------------------------------------------- csv

CSV_HEADER = [
    "run_id",
    "seed",
    "n_sensors",
    "p_fail",
    "wake_multiplier",
    "recovery_mode",
    "lifetime",
    "coverage_rate",
    "recovery_failure_rate",
    "msgs_probe",
    "msgs_reply",
    "msgs_replica",
    "msgs_fresh",
    "wakeups_total",
    "moves_max_segment",
    "bound_ok",
]


def csv_row(run_id: str, result, report: VerifyReport) -> list[str]:
    cfg = result.config
    c = result.counters
    bound_ok = report.moves_ok and report.msgs_ok
    return [
        run_id,
        str(cfg.seed),
        str(cfg.n_sensors),
        f"{cfg.p_fail:.6f}",
        f"{cfg.wake_multiplier:.6f}",
        cfg.recovery_mode,
        f"{result.lifetime:.6f}",
        f"{result.coverage_rate:.6f}",
        f"{result.recovery_failure_rate:.6f}",
        str(c["msgs_probe"]),
        str(c["msgs_reply"]),
        str(c["msgs_replica"]),
        str(c["msgs_fresh"]),
        str(c["wakeups_total"]),
        str(report.max_moves),
        "true" if bound_ok else "false",
    ]


def write_csv(path, rows: list[list[str]]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        w.writerows(rows)


def read_csv(path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
