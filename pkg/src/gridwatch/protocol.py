"""Guarded-command rule core for the sleep/wake scheduling protocol.

A node is Sleeping, Probing, Working, or Failed. Probing nodes assemble a view
of their co-zone (id -> state) and fire exactly one of two rules; Working
nodes step down when a lower-id Working co-zone mate exists. All functions
here are pure: the simulation engine owns timing, messaging, and recovery
side effects.

Predicates over a view, evaluated for node i:

* W:  some member is Working
* W*: some Working member has a lower id than i
* F:  some member is Failed
* P*: some Probing member has a lower id than i

Rules:

* r1 (Probing, P* or W):          go back to sleep; on P*, rescale the
                                  probing rate by d_init/d_alive.
* r2 (Probing, (not W and not P*) or F): become Working; on F, request
                                  recovery of the lowest-id failed member.
* r3 (Working, W*):               yield to the lower-id worker and sleep.

r1 and r2 overlap only when F holds together with (P* or W); the detected
failure wins and r2 fires, so a data loss is always picked up even when the
zone is otherwise attended.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

__all__ = [
    "NodeState",
    "Rule",
    "SensorNode",
    "RuleAction",
    "predicates",
    "rule_r1",
    "rule_r2",
    "rule_r3",
    "step",
    "sample_sleep_duration",
]


class NodeState(enum.Enum):
    SLEEPING = "sleeping"
    PROBING = "probing"
    WORKING = "working"
    FAILED = "failed"


class Rule(enum.Enum):
    R1 = "r1"
    R2 = "r2"
    R3 = "r3"


# View: co-zone member id -> that member's state, self excluded.
LocalView = dict[int, NodeState]


@dataclass
class SensorNode:
    """Protocol-visible per-node state.

    probe_rate is the node's current lambda; d_init/d_alive are the initial
    and currently-alive sizes of its eligible (out-of-zone) neighbor set.
    own_data is the node's most recent sensed word.
    """

    id: int
    state: NodeState
    probe_rate: float
    d_init: int
    d_alive: int
    own_data: int = 0

    def __post_init__(self) -> None:
        if self.probe_rate <= 0:
            raise ValueError("probe_rate must be positive")
        if not (0 <= self.d_alive <= self.d_init):
            raise ValueError("d_alive must lie in [0, d_init]")


@dataclass
class RuleAction:
    rule: Rule | None
    next_state: NodeState
    new_lambda: float | None = None
    recovery_request: int | None = None


def predicates(view: LocalView, self_id: int) -> tuple[bool, bool, bool, bool]:
    """Evaluate (W, W_star, F, P_star) for node self_id over its view."""
    w = w_star = f = p_star = False
    for j, st in view.items():
        if st is NodeState.WORKING:
            w = True
            if j < self_id:
                w_star = True
        elif st is NodeState.FAILED:
            f = True
        elif st is NodeState.PROBING and j < self_id:
            p_star = True
    return w, w_star, f, p_star


def _rescaled_lambda(node: SensorNode, lambda_max: float | None) -> float | None:
    # d_alive = 0 would divide by zero; the update is skipped then.
    if node.d_alive == 0 or node.d_init == 0:
        return None
    lam = node.probe_rate * node.d_init / node.d_alive
    if lambda_max is not None:
        lam = min(lam, lambda_max)
    return lam


def rule_r1(
    node: SensorNode, view: LocalView, lambda_max: float | None = None
) -> RuleAction | None:
    """Probing node finds the zone attended (or a lower-id prober): sleep again."""
    if node.state is not NodeState.PROBING:
        raise ValueError("r1 applies to probing nodes")
    w, _, _, p_star = predicates(view, node.id)
    if not (p_star or w):
        return None
    new_lambda = _rescaled_lambda(node, lambda_max) if p_star else None
    return RuleAction(Rule.R1, NodeState.SLEEPING, new_lambda=new_lambda)


def rule_r2(node: SensorNode, view: LocalView) -> RuleAction | None:
    """Probing node takes over the zone; a detected failure triggers recovery."""
    if node.state is not NodeState.PROBING:
        raise ValueError("r2 applies to probing nodes")
    w, _, f, p_star = predicates(view, node.id)
    if not ((not w and not p_star) or f):
        return None
    request = None
    if f:
        request = min(j for j, st in view.items() if st is NodeState.FAILED)
    return RuleAction(Rule.R2, NodeState.WORKING, recovery_request=request)


def rule_r3(node: SensorNode, view: LocalView) -> RuleAction | None:
    """Working node sees a lower-id worker: redundant, go to sleep."""
    if node.state is not NodeState.WORKING:
        raise ValueError("r3 applies to working nodes")
    _, w_star, _, _ = predicates(view, node.id)
    if not w_star:
        return None
    return RuleAction(Rule.R3, NodeState.SLEEPING)


def step(
    node: SensorNode, view: LocalView, lambda_max: float | None = None
) -> RuleAction:
    """Dispatch the single enabled rule for this node and view.

    For a Probing node exactly one of r1/r2 is enabled (F dominates the
    overlap). Sleeping and Failed nodes never fire.
    """
    if node.state is NodeState.PROBING:
        _, _, f, _ = predicates(view, node.id)
        if f:
            act = rule_r2(node, view)
            assert act is not None
            return act
        act = rule_r1(node, view, lambda_max)
        if act is not None:
            return act
        act = rule_r2(node, view)
        assert act is not None  # guards of r1/r2 cover all probing cases
        return act
    if node.state is NodeState.WORKING:
        act = rule_r3(node, view)
        if act is not None:
            return act
        return RuleAction(None, NodeState.WORKING)
    return RuleAction(None, node.state)


def sample_sleep_duration(lam: float, u: float) -> float:
    """Inverse-transform sample of the exponential sleep law f(t) = lam*exp(-lam*t).

    u must lie in (0, 1]; u = 0 maps to an infinite duration and is rejected.
    """
    if lam <= 0:
        raise ValueError("rate must be positive")
    if not (0.0 < u <= 1.0):
        raise ValueError("u must lie in (0, 1]")
    return -math.log(u) / lam
