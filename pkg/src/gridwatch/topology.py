"""Grid deployment model.

A rows x cols field of unit cells. One monitoring target sits at each cell
center; sensors are scattered uniformly at random over the field. Two derived
structures matter downstream:

* ``gamma``: per target, the sensors physically able to monitor it
  (Euclidean distance <= r_sense). This drives coverage and lifetime.
* ``nbrs``: the communication graph (distance <= r_comm), which drives
  replica placement and message delivery.

Protocol rules quantify over *co-zone* sets (sensors placed in the same cell),
which are derived from positions via :func:`zone_of` / :func:`zone_members`,
not from gamma.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Topology",
    "build_grid",
    "zone_of",
    "zone_members",
    "degrees",
    "edge_count",
    "to_json",
    "from_json",
]


@dataclass
class Topology:
    rows: int
    cols: int
    r_sense: float
    r_comm: float
    sensor_pos: dict[int, tuple[float, float]]
    target_pos: dict[int, tuple[float, float]]
    gamma: dict[int, set[int]] = field(repr=False)
    nbrs: dict[int, set[int]] = field(repr=False)

    @property
    def n_sensors(self) -> int:
        return len(self.sensor_pos)

    @property
    def n_targets(self) -> int:
        return len(self.target_pos)


def _derive_sets(
    rows: int,
    cols: int,
    r_sense: float,
    r_comm: float,
    sensor_pos: dict[int, tuple[float, float]],
    target_pos: dict[int, tuple[float, float]],
) -> tuple[dict[int, set[int]], dict[int, set[int]]]:
    sids = sorted(sensor_pos)
    if not sids:
        return {u: set() for u in sorted(target_pos)}, {}
    sp = np.array([sensor_pos[i] for i in sids])
    tp = np.array([target_pos[u] for u in sorted(target_pos)])

    # gamma: target -> sensors within r_sense
    gamma: dict[int, set[int]] = {}
    d_ts = np.sqrt(((tp[:, None, :] - sp[None, :, :]) ** 2).sum(axis=2))
    for k, u in enumerate(sorted(target_pos)):
        gamma[u] = {sids[j] for j in np.nonzero(d_ts[k] <= r_sense)[0]}

    # nbrs: symmetric comm graph, self excluded
    d_ss = np.sqrt(((sp[:, None, :] - sp[None, :, :]) ** 2).sum(axis=2))
    nbrs: dict[int, set[int]] = {}
    for a, i in enumerate(sids):
        close = np.nonzero(d_ss[a] <= r_comm)[0]
        nbrs[i] = {sids[b] for b in close if b != a}
    return gamma, nbrs


def build_grid(
    rows: int,
    cols: int,
    n_sensors: int,
    r_sense: float,
    r_comm: float,
    seed: int,
) -> Topology:
    """Place targets at cell centers and sensors uniformly at random.

    Placement comes from an explicitly seeded generator so identical
    arguments always produce the identical topology.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must have at least one cell")
    if n_sensors < 1:
        raise ValueError("need at least one sensor")
    if r_sense <= 0 or r_comm <= 0:
        raise ValueError("radii must be positive")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    xs = rng.uniform(0.0, cols, n_sensors)
    ys = rng.uniform(0.0, rows, n_sensors)
    sensor_pos = {i: (float(xs[i]), float(ys[i])) for i in range(n_sensors)}
    target_pos = {
        r * cols + c: (c + 0.5, r + 0.5) for r in range(rows) for c in range(cols)
    }
    gamma, nbrs = _derive_sets(rows, cols, r_sense, r_comm, sensor_pos, target_pos)
    return Topology(rows, cols, r_sense, r_comm, sensor_pos, target_pos, gamma, nbrs)


def zone_of(topo: Topology) -> dict[int, int]:
    """Map each sensor to the target of the cell containing it."""
    out: dict[int, int] = {}
    for i in sorted(topo.sensor_pos):
        x, y = topo.sensor_pos[i]
        c = min(int(math.floor(x)), topo.cols - 1)
        r = min(int(math.floor(y)), topo.rows - 1)
        out[i] = r * topo.cols + c
    return out


def zone_members(topo: Topology) -> dict[int, set[int]]:
    """Map each target to the sensors placed in its cell (the co-zone set)."""
    zof = zone_of(topo)
    members: dict[int, set[int]] = {u: set() for u in topo.target_pos}
    for i, u in zof.items():
        members[u].add(i)
    return members


def degrees(topo: Topology, target_of: dict[int, int]) -> dict[int, int]:
    """Replication degree d_i = |N_i minus co-zone minus self|.

    Only out-of-zone comm neighbors are eligible replica holders, so d_i
    counts exactly those.
    """
    members = {u: set() for u in topo.target_pos}
    for i, u in target_of.items():
        members[u].add(i)
    d: dict[int, int] = {}
    for i in sorted(topo.sensor_pos):
        co = members[target_of[i]]
        d[i] = len(topo.nbrs[i] - co - {i})
    return d


def edge_count(topo: Topology) -> int:
    """Number of undirected comm edges m."""
    total = sum(len(v) for v in topo.nbrs.values())
    assert total % 2 == 0
    return total // 2


def to_json(topo: Topology) -> str:
    """Serialize with fixed field order: rows, cols, r_sense, r_comm, sensors, targets."""
    doc = {
        "rows": topo.rows,
        "cols": topo.cols,
        "r_sense": topo.r_sense,
        "r_comm": topo.r_comm,
        "sensors": [
            {"id": i, "x": topo.sensor_pos[i][0], "y": topo.sensor_pos[i][1]}
            for i in sorted(topo.sensor_pos)
        ],
        "targets": [
            {"id": u, "x": topo.target_pos[u][0], "y": topo.target_pos[u][1]}
            for u in sorted(topo.target_pos)
        ],
    }
    return json.dumps(doc)


def from_json(text: str) -> Topology:
    """Rebuild a topology (gamma and nbrs are re-derived from positions)."""
    doc = json.loads(text)
    sensor_pos = {int(s["id"]): (float(s["x"]), float(s["y"])) for s in doc["sensors"]}
    target_pos = {int(t["id"]): (float(t["x"]), float(t["y"])) for t in doc["targets"]}
    gamma, nbrs = _derive_sets(
        doc["rows"], doc["cols"], doc["r_sense"], doc["r_comm"], sensor_pos, target_pos
    )
    return Topology(
        doc["rows"], doc["cols"], doc["r_sense"], doc["r_comm"],
        sensor_pos, target_pos, gamma, nbrs,
    )
