"""Deterministic discrete-event simulator for the sleep/wake protection protocol.

Execution model
---------------
Nodes sleep, wake to probe their cell, and either take over sensing duty or
go back to sleep, per the three guarded rules in `protocol`. A probe opens a
short reply window; when it closes the prober evaluates its rule against the
*current* states of its cell mates (one atomic guarded-command step, which is
a legal serialization of the protocol's daemon). Working nodes sense on a
fixed period, replicate each fresh word to every alive out-of-cell comm
neighbor, and only then roll the per-cycle failure die, so a crashed worker's
latest word is always held somewhere iff it had an alive holder.

Failure episodes: a death while Working opens a recovery obligation; the
dead node shows up as Failed in cell views until exactly one recovery attempt
(successful or not) closes it. Deaths in any other state lose nothing that
was not already replicated and stay invisible.

Everything random flows through one ordered stream (a numpy Generator by
default, any object with .random() for tests), and all iteration is in
sorted-id order, so a (config, seed) pair reproduces its trace bit for bit.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .protocol import NodeState, Rule, SensorNode, sample_sleep_duration, step
from .recovery import (
    RecoveryFailed,
    ReplicaStore,
    StoreMode,
    absorb,
    place_replicas,
    recover_multi,
    recover_xor,
    retire,
)
from .topology import Topology, build_grid, zone_members, zone_of
from .trace import Trace

SLEEPING, PROBING, WORKING, FAILED = (
    NodeState.SLEEPING,
    NodeState.PROBING,
    NodeState.WORKING,
    NodeState.FAILED,
)


class EnergyModel(BaseModel):
    """Per-action energy debits, in the same abstract units as e_init."""

    model_config = ConfigDict(extra="forbid")

    e_init: float = 25.0
    c_tx: float = 0.0025
    c_rx: float = 0.125
    c_wake: float = 0.005
    c_sense: float = 2.0
    c_active: float = 0.0  # per unit time working, charged at sense points

    @field_validator("e_init", "c_tx", "c_rx", "c_wake", "c_sense", "c_active")
    @classmethod
    def _nonneg(cls, v):
        if v < 0:
            raise ValueError("energy parameters must be >= 0")
        return v


class SimConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rows: int = 10
    cols: int = 10
    n_sensors: int = 200
    r_sense: float = 1.0
    r_comm: float = 1.5
    seed: int = 0
    lambda_base: float = 0.12
    wake_multiplier: float = 1.0
    recovery_mode: str = "sum"
    p_fail: float = 0.0
    sense_period: float = 1.0
    energy: EnergyModel = Field(default_factory=EnergyModel)
    t_max: float = 50.0
    # the network is pronounced dead when some target loses its whole
    # sensing set; set False to keep simulating node behaviour past that
    # point (lifetime and coverage still freeze at the death time)
    stop_at_lifetime: bool = True
    reliability_R: float = 0.9
    lambda_max: float | None = None  # None means 100x lambda_base
    reply_delay: float = 0.05
    trace_mode: str = "counters"

    @field_validator("rows", "cols", "n_sensors")
    @classmethod
    def _pos_int(cls, v):
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator(
        "r_sense", "r_comm", "lambda_base", "wake_multiplier", "sense_period", "t_max"
    )
    @classmethod
    def _pos(cls, v):
        if v <= 0:
            raise ValueError("must be > 0")
        return v

    @field_validator("p_fail")
    @classmethod
    def _prob(cls, v):
        if not (0.0 <= v <= 1.0):
            raise ValueError("p_fail must lie in [0, 1]")
        return v

    @field_validator("reliability_R")
    @classmethod
    def _rel(cls, v):
        if not (0.0 < v <= 1.0):
            raise ValueError("reliability_R must lie in (0, 1]")
        return v

    @field_validator("recovery_mode")
    @classmethod
    def _mode(cls, v):
        if v not in ("sum", "xor"):
            raise ValueError("recovery_mode must be 'sum' or 'xor'")
        return v

    @field_validator("trace_mode")
    @classmethod
    def _tmode(cls, v):
        if v not in ("counters", "full"):
            raise ValueError("trace_mode must be 'counters' or 'full'")
        return v

    @field_validator("reply_delay")
    @classmethod
    def _delay(cls, v):
        if v <= 0:
            raise ValueError("reply_delay must be > 0")
        return v

    @property
    def lambda_cap(self) -> float:
        return self.lambda_max if self.lambda_max is not None else 100.0 * self.lambda_base


def _mix64(x: int) -> int:
    # splitmix64 finalizer; gives each sense cycle a distinct word without
    # touching the simulation's random stream
    mask = (1 << 64) - 1
    x = (x + 0x9E3779B97F4A7C15) & mask
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & mask
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & mask
    return (x ^ (x >> 31)) & mask


@dataclass
class _Rt:
    """Engine-side runtime wrapped around one protocol node."""

    node: SensorNode
    zone: int
    resp: list[int]  # cell mates in comm range, sorted, self excluded
    holders: tuple[int, ...]  # replica candidates, sorted, static
    store: ReplicaStore
    sent: dict[int, int] = field(default_factory=dict)  # holder -> last word sent
    alive: bool = True
    # single debit ledger; remaining energy is always e_init - debits, so
    # conservation cannot drift no matter the summation order
    debits: float = 0.0
    wake_tok: int = 0
    probe_tok: int = 0
    sense_tok: int = 0
    death_t: float | None = None
    min_delta: float = math.inf  # smallest sleep duration drawn


@dataclass
class RunResult:
    config: SimConfig
    trace: Trace

    @property
    def summary(self) -> dict:
        return self.trace.summary

    @property
    def lifetime(self) -> float:
        return self.trace.summary["lifetime"]

    @property
    def coverage_rate(self) -> float:
        return self.trace.summary["coverage_rate"]

    @property
    def counters(self) -> dict:
        return self.trace.summary["counters"]

    @property
    def recovery_failure_rate(self) -> float:
        c = self.counters
        if c["recovery_attempts"] == 0:
            return 0.0
        return c["recovery_failures"] / c["recovery_attempts"]


# event kinds, compared only through (time, seq) heap keys
_WAKE, _REPLIES, _CLOSE, _SENSE, _KILL = "wake", "replies", "close", "sense", "kill"


class Simulation:
    """One seeded run over a fixed topology.

    rng only needs a .random() -> [0, 1) method; tests inject stubs to force
    exact wake times. initial_states places nodes mid-protocol for
    convergence-from-anywhere runs. kill_schedule injects (time, node) deaths
    on top of the organic ones.
    """

    def __init__(
        self,
        cfg: SimConfig,
        topo: Topology | None = None,
        rng=None,
        initial_states: dict[int, NodeState] | None = None,
        kill_schedule: list[tuple[float, int]] | None = None,
    ):
        self.cfg = cfg
        self.topo = topo or build_grid(
            cfg.rows, cfg.cols, cfg.n_sensors, cfg.r_sense, cfg.r_comm, cfg.seed
        )
        self.rng = rng if rng is not None else np.random.default_rng(
            np.random.SeedSequence(entropy=cfg.seed, spawn_key=(1,))
        )
        self.full = cfg.trace_mode == "full"
        self.mode = StoreMode(cfg.recovery_mode)

        zof = zone_of(self.topo)
        members = zone_members(self.topo)
        self.zone_of_node = zof
        self.members = {u: sorted(s) for u, s in members.items()}

        self.rt: dict[int, _Rt] = {}
        for i in sorted(self.topo.sensor_pos):
            z = zof[i]
            cands = self.topo.nbrs[i] - members[z] - {i}
            placement = place_replicas(i, cands)
            lam = cfg.lambda_base / len(members[z])
            st0 = SLEEPING
            if initial_states and i in initial_states:
                st0 = initial_states[i]
            node = SensorNode(
                id=i,
                state=st0,
                probe_rate=lam,
                d_init=len(cands),
                d_alive=len(cands),
            )
            self.rt[i] = _Rt(
                node=node,
                zone=z,
                resp=sorted((members[z] - {i}) & self.topo.nbrs[i]),
                holders=tuple(sorted(placement.holders)),
                store=ReplicaStore(mode=self.mode),
            )

        # sensing sets drive the lifetime clock; cells drive coverage
        self.gamma_of: dict[int, list[int]] = {i: [] for i in self.rt}
        self.gamma_alive: dict[int, int] = {}
        for u in sorted(self.topo.target_pos):
            g = self.topo.gamma[u]
            if g:
                self.gamma_alive[u] = len(g)
                for i in g:
                    self.gamma_of[i].append(u)

        self.zone_workers = {u: 0 for u in self.topo.target_pos}
        self.cov_start: dict[int, float] = {}
        self.cov_time = {u: 0.0 for u in self.topo.target_pos}

        self.episode_open: set[int] = set()
        self.zone_episodes = {u: 0 for u in self.topo.target_pos}

        self.counters = {
            "msgs_probe": 0,
            "msgs_reply": 0,
            "msgs_replica": 0,
            "msgs_fresh": 0,
            "wakeups_total": 0,
            "recovery_attempts": 0,
            "recovery_failures": 0,
        }

        self.q: list = []
        self._seq = itertools.count()
        self._wordseq = itertools.count()
        self.stop_t: float | None = None
        self.lifetime_hit = False
        self._ran = False

        header = {
            "config": self.cfg.model_dump(),
            "n": self.topo.n_sensors,
            "m": self.topo.n_targets,
            "zones": {str(u): self.members[u] for u in sorted(self.members)},
            "gamma": {str(u): sorted(self.topo.gamma[u]) for u in sorted(self.topo.gamma)},
            "d_init": {str(i): self.rt[i].node.d_init for i in sorted(self.rt)},
            "initial_states": {str(i): self.rt[i].node.state.value for i in sorted(self.rt)},
            "initial_wakes": {},
        }
        self.trace = Trace(header=header)

        if kill_schedule:
            for t, i in kill_schedule:
                self._push(t, _KILL, i, None)

        self._bootstrap()

    # ------------------------------------------------------------- plumbing

    def _push(self, t: float, kind: str, node: int, arg) -> None:
        heapq.heappush(self.q, (t, next(self._seq), kind, node, arg))

    def _spend(self, i: int, amount: float) -> None:
        self.rt[i].debits += amount

    def _energy(self, i: int) -> float:
        return self.cfg.energy.e_init - self.rt[i].debits

    def _maybe_die(self, i: int, t: float) -> None:
        rt = self.rt[i]
        if rt.alive and rt.debits >= self.cfg.energy.e_init:
            self._die(i, t, "energy")

    def _next_word(self) -> int:
        return _mix64(next(self._wordseq))

    def _draw_sleep(self, i: int, t: float) -> float:
        rt = self.rt[i]
        lam_eff = rt.node.probe_rate * self.cfg.wake_multiplier
        u = 1.0 - self.rng.random()  # (0, 1]
        dur = sample_sleep_duration(lam_eff, u)
        if dur < rt.min_delta:
            rt.min_delta = dur
        rt.wake_tok += 1
        self._push(t + dur, _WAKE, i, rt.wake_tok)
        return dur

    def _zone_legit(self, z: int) -> bool:
        return self.zone_workers[z] == 1 and self.zone_episodes[z] == 0

    def _view(self, i: int) -> dict[int, NodeState]:
        # current states of reachable cell mates; dead ones appear as Failed
        # only while their episode is open (recovered losses are old news)
        v: dict[int, NodeState] = {}
        for j in self.rt[i].resp:
            rtj = self.rt[j]
            if rtj.alive:
                v[j] = rtj.node.state
            elif j in self.episode_open:
                v[j] = FAILED
        return v

    def _begin_work(self, i: int, t: float) -> None:
        z = self.rt[i].zone
        if self.zone_workers[z] == 0 and not self.lifetime_hit:
            self.cov_start[z] = t
        self.zone_workers[z] += 1

    def _end_work(self, i: int, t: float) -> None:
        z = self.rt[i].zone
        self.zone_workers[z] -= 1
        if self.zone_workers[z] == 0 and z in self.cov_start:
            self.cov_time[z] += t - self.cov_start.pop(z)

    def _hit_lifetime(self, t: float, u: int) -> None:
        self.lifetime_hit = True
        self.stop_t = t
        self.trace.record("lifetime", t, target=u)
        # coverage is defined over the network's life; freeze it here even
        # if the engine keeps running
        for z, start in sorted(self.cov_start.items()):
            self.cov_time[z] += t - start
        self.cov_start.clear()

    def _die(self, i: int, t: float, cause: str) -> None:
        rt = self.rt[i]
        was = rt.node.state
        rt.alive = False
        rt.death_t = t
        rt.node.state = FAILED
        episode = was is WORKING
        if was is WORKING:
            self._end_work(i, t)
        if episode:
            self.episode_open.add(i)
            self.zone_episodes[rt.zone] += 1
        self.trace.record(
            "death", t, node=i, was=was.value, episode=episode, cause=cause,
            e=self._energy(i),
        )
        for u in self.gamma_of[i]:
            self.gamma_alive[u] -= 1
            if self.gamma_alive[u] == 0 and not self.lifetime_hit:
                self._hit_lifetime(t, u)

    # ------------------------------------------------------------ handlers

    def _bootstrap(self) -> None:
        # placed-as-dead nodes carry no data and no obligation, but they do
        # count against the sensing sets; mark them before anyone probes
        for i in sorted(self.rt):
            rt = self.rt[i]
            if rt.node.state is not FAILED:
                continue
            rt.alive = False
            rt.death_t = 0.0
            for u in self.gamma_of[i]:
                self.gamma_alive[u] -= 1
                if self.gamma_alive[u] == 0 and not self.lifetime_hit:
                    self._hit_lifetime(0.0, u)
        for i in sorted(self.rt):
            rt = self.rt[i]
            st = rt.node.state
            if st is SLEEPING:
                dur = self._draw_sleep(i, 0.0)
                self.trace.header["initial_wakes"][str(i)] = dur
            elif st is WORKING:
                self._begin_work(i, 0.0)
                rt.sense_tok += 1
                self._push(0.0, _SENSE, i, rt.sense_tok)
            elif st is PROBING:
                self._start_probe(i, 0.0)

    def _start_probe(self, i: int, t: float) -> None:
        cfg = self.cfg
        rt = self.rt[i]
        rt.probe_tok += 1
        self._spend(i, cfg.energy.c_wake + cfg.energy.c_tx)
        self.counters["msgs_probe"] += 1
        self.counters["wakeups_total"] += 1
        if self.full:
            self.trace.record("msg", t, typ="probe", src=i, dst=-1)
        replies = 0
        for j in rt.resp:
            rtj = self.rt[j]
            if not rtj.alive:
                continue
            # hearing the probe and answering it costs the neighbor now
            self._spend(j, cfg.energy.c_rx + cfg.energy.c_tx)
            self.counters["msgs_reply"] += 1
            replies += 1
            if self.full:
                self.trace.record("msg", t, typ="reply", src=j, dst=i)
            self._maybe_die(j, t)
        self.trace.record("wake", t, node=i, replies=replies)
        self._push(t + cfg.reply_delay / 2.0, _REPLIES, i, (rt.probe_tok, replies))
        self._push(t + cfg.reply_delay, _CLOSE, i, rt.probe_tok)
        self._maybe_die(i, t)

    def _on_wake(self, t: float, i: int, tok: int) -> None:
        rt = self.rt[i]
        if not rt.alive or rt.node.state is not SLEEPING or tok != rt.wake_tok:
            return
        rt.node.state = PROBING
        self._start_probe(i, t)

    def _on_replies(self, t: float, i: int, arg) -> None:
        tok, k = arg
        rt = self.rt[i]
        if not rt.alive or tok != rt.probe_tok:
            return
        self._spend(i, self.cfg.energy.c_rx * k)
        self._maybe_die(i, t)

    def _on_close(self, t: float, i: int, tok: int) -> None:
        rt = self.rt[i]
        if not rt.alive or rt.node.state is not PROBING or tok != rt.probe_tok:
            return
        rt.node.d_alive = sum(1 for h in rt.holders if self.rt[h].alive)
        view = self._view(i)
        legit = self._zone_legit(rt.zone)
        act = step(rt.node, view, self.cfg.lambda_cap)
        if act.rule is Rule.R1:
            if act.new_lambda is not None:
                rt.node.probe_rate = act.new_lambda
            rt.node.state = SLEEPING
            dur = self._draw_sleep(i, t)
            self.trace.record(
                "rule", t, node=i, rule="r1", stutter=legit, sleep_for=dur,
                lam=rt.node.probe_rate,
            )
        elif act.rule is Rule.R2:
            rt.node.state = WORKING
            rt.sense_tok += 1
            self._begin_work(i, t)
            self.trace.record("rule", t, node=i, rule="r2", stutter=legit)
            recovered = None
            if act.recovery_request is not None:
                recovered = self._recover(i, act.recovery_request, t)
            if rt.alive:
                self._sense_cycle(i, t, first=True, install=recovered)
            if not (self.lifetime_hit and self.cfg.stop_at_lifetime):
                self._resolve_zone(rt.zone, t)

    def _resolve_zone(self, z: int, t: float) -> None:
        # a takeover forced by a failure can leave two workers in a cell for
        # an instant; the higher-Id ones see a lower-Id worker and step down
        if self.zone_workers[z] <= 1:
            return
        for j in sorted(self.members[z], reverse=True):
            rtj = self.rt[j]
            if not rtj.alive or rtj.node.state is not WORKING:
                continue
            act = step(rtj.node, self._view(j), self.cfg.lambda_cap)
            if act.rule is Rule.R3:
                legit = self._zone_legit(z)
                rtj.node.state = SLEEPING
                self._end_work(j, t)
                dur = self._draw_sleep(j, t)
                self.trace.record(
                    "rule", t, node=j, rule="r3", stutter=legit, sleep_for=dur
                )

    def _on_sense(self, t: float, i: int, tok: int) -> None:
        rt = self.rt[i]
        if not rt.alive or rt.node.state is not WORKING or tok != rt.sense_tok:
            return
        # duty check before spending: a worker that spots a lower-Id worker
        # in its cell yields instead of sensing
        act = step(rt.node, self._view(i), self.cfg.lambda_cap)
        if act.rule is Rule.R3:
            legit = self._zone_legit(rt.zone)
            rt.node.state = SLEEPING
            self._end_work(i, t)
            dur = self._draw_sleep(i, t)
            self.trace.record(
                "rule", t, node=i, rule="r3", stutter=legit, sleep_for=dur
            )
            return
        self._sense_cycle(i, t, first=False)

    def _sense_cycle(self, i: int, t: float, first: bool, install: int | None = None) -> None:
        cfg = self.cfg
        rt = self.rt[i]
        word = install if install is not None else self._next_word()
        rt.node.own_data = word
        cost = cfg.energy.c_sense
        if not first:
            cost += cfg.energy.c_active * cfg.sense_period
        fanout = 0
        for h in rt.holders:
            if not self.rt[h].alive:
                continue  # dead holders are dropped for good
            absorb(self.rt[h].store, i, rt.sent.get(h), word)
            rt.sent[h] = word
            fanout += 1
            if self.full:
                self.trace.record("msg", t, typ="replica", src=i, dst=h)
        cost += cfg.energy.c_tx * fanout
        self.counters["msgs_replica"] += fanout
        self._spend(i, cost)
        if rt.debits >= cfg.energy.e_init:
            self._die(i, t, "energy")
            return
        if cfg.p_fail > 0.0 and self.rng.random() < cfg.p_fail:
            self._die(i, t, "fault")
            return
        rt.sense_tok += 1
        self._push(t + cfg.sense_period, _SENSE, i, rt.sense_tok)

    def _recover(self, recoverer: int, f: int, t: float) -> int | None:
        """One attempt at pulling the failed node's last word back.

        Scans the failed node's surviving holders in seeded-random order.
        Register mode needs any one of them. Parity mode additionally needs
        every other contributor of that holder's parity to be alive (or
        already canceled out), else that parity cannot be unfolded and the
        next holder is tried. The episode closes either way: one obligation,
        one attempt, one recoverer.
        """
        cfg = self.cfg
        self.counters["recovery_attempts"] += 1
        if f in self.episode_open:
            self.episode_open.discard(f)
            self.zone_episodes[self.rt[f].zone] -= 1
        cands = [h for h in self.rt[f].holders if self.rt[h].alive]
        # Fisher-Yates off the run stream keeps the scan order seeded
        for k in range(len(cands) - 1, 0, -1):
            j = int(self.rng.random() * (k + 1))
            cands[k], cands[j] = cands[j], cands[k]
        word = None
        tried = 0
        for h in cands:
            tried += 1
            self.counters["msgs_fresh"] += 2
            self._spend(recoverer, cfg.energy.c_tx + cfg.energy.c_rx)
            if self.full:
                self.trace.record("msg", t, typ="fresh", src=recoverer, dst=h)
            store = self.rt[h].store
            if self.mode is StoreMode.MULTI_REGISTER:
                try:
                    word = recover_multi(store, f)
                    break
                except RecoveryFailed:
                    continue
            if f not in store.contributors:
                continue
            others = sorted(store.contributors - {f})
            if any(not self.rt[c].alive for c in others):
                continue  # a dead word is still folded in; parity unusable
            fresh = {}
            for c in others:
                self.counters["msgs_fresh"] += 2
                self._spend(recoverer, cfg.energy.c_tx + cfg.energy.c_rx)
                if self.full:
                    self.trace.record("msg", t, typ="fresh", src=recoverer, dst=c)
                fresh[c] = self.rt[c].node.own_data
            word = recover_xor(store, f, fresh)
            break
        ok = word is not None
        if ok:
            # cancel the recovered word everywhere so surviving parities only
            # cover live contributors
            for h in self.rt[f].holders:
                if self.rt[h].alive and f in self.rt[h].store.contributors:
                    retire(self.rt[h].store, f, self.rt[f].sent[h])
                    self.counters["msgs_fresh"] += 1
                    self._spend(recoverer, cfg.energy.c_tx)
        else:
            self.counters["recovery_failures"] += 1
        self.trace.record(
            "recovery", t, node=recoverer, failed=f, ok=ok, tried=tried,
            mode=cfg.recovery_mode,
        )
        self._maybe_die(recoverer, t)
        return word

    def _on_kill(self, t: float, i: int, _arg) -> None:
        if self.rt[i].alive:
            self._die(i, t, "injected")

    # ----------------------------------------------------------------- run

    def run(self) -> RunResult:
        if self._ran:
            raise RuntimeError("a Simulation runs once; build a fresh one")
        self._ran = True
        cfg = self.cfg
        handlers = {
            _WAKE: self._on_wake,
            _REPLIES: self._on_replies,
            _CLOSE: self._on_close,
            _SENSE: self._on_sense,
            _KILL: self._on_kill,
        }
        while self.q and not (self.lifetime_hit and cfg.stop_at_lifetime):
            t, _, kind, node, arg = heapq.heappop(self.q)
            if t > cfg.t_max:
                break
            handlers[kind](t, node, arg)
        # the lifetime metric ends at the first sensing-set death; the
        # horizon is how long the engine actually processed events
        lifetime = self.stop_t if self.lifetime_hit else cfg.t_max
        horizon = lifetime if cfg.stop_at_lifetime else cfg.t_max
        for z, start in sorted(self.cov_start.items()):
            self.cov_time[z] += lifetime - start
        self.cov_start.clear()

        m = self.topo.n_targets
        coverage = 0.0
        if lifetime > 0:
            coverage = sum(self.cov_time.values()) / (m * lifetime)
        nodes = {}
        for i in sorted(self.rt):
            rt = self.rt[i]
            t_i = rt.death_t if rt.death_t is not None else horizon
            dmin = rt.min_delta if rt.min_delta < math.inf else None
            nodes[str(i)] = [t_i, dmin, self._energy(i), rt.debits]
        self.trace.summary = {
            "lifetime": lifetime,
            "horizon": horizon,
            "censored": not self.lifetime_hit,
            "coverage_rate": coverage,
            "counters": dict(self.counters),
            "final_states": {str(i): self.rt[i].node.state.value for i in sorted(self.rt)},
            "nodes": nodes,
        }
        return RunResult(config=cfg, trace=self.trace)


def simulate(
    cfg: SimConfig,
    topo: Topology | None = None,
    rng=None,
    initial_states: dict[int, NodeState] | None = None,
    kill_schedule: list[tuple[float, int]] | None = None,
) -> RunResult:
    return Simulation(
        cfg, topo=topo, rng=rng, initial_states=initial_states,
        kill_schedule=kill_schedule,
    ).run()
