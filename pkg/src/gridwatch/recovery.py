"""Replica stores and data recovery.

Every sensor owns a 64-bit data word refreshed each sense cycle and mirrors
it onto all eligible neighbors (comm neighbors outside its own zone). A
holder keeps contributions in one of two ways:

* MULTI_REGISTER: one register per contributor. Recovery is a direct read
  of the failed contributor's register; memory grows with the neighbor count.
* XOR_PARITY: a single parity word, the XOR of the most recent word from
  each contributor. Recovery of one contributor XORs the parity with fresh
  words from every *other* contributor, so one unreachable contributor
  corrupts the reconstruction. That fragility is the whole trade-off.

DataWord is a plain int in [0, 2**64).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

__all__ = [
    "WORD_MASK",
    "StoreMode",
    "RecoveryFailed",
    "ReplicaStore",
    "ReplicaPlacement",
    "place_replicas",
    "absorb",
    "retire",
    "recover_multi",
    "recover_xor",
    "reliable_lifetime",
]

WORD_MASK = (1 << 64) - 1


class StoreMode(enum.Enum):
    MULTI_REGISTER = "sum"
    XOR_PARITY = "xor"


class RecoveryFailed(Exception):
    """Raised when a store cannot reconstruct the requested word."""


def _check_word(word: int) -> int:
    if not (0 <= word <= WORD_MASK):
        raise ValueError("data word out of 64-bit range")
    return word


@dataclass
class ReplicaStore:
    """Holder-side state for replicated words, in either mode."""

    mode: StoreMode
    registers: dict[int, int] = field(default_factory=dict)  # MULTI_REGISTER only
    parity: int = 0  # XOR_PARITY only
    contributors: set[int] = field(default_factory=set)


@dataclass(frozen=True)
class ReplicaPlacement:
    owner: int
    holders: frozenset[int]

    @property
    def unprotected(self) -> bool:
        return not self.holders


def place_replicas(owner: int, candidates: set[int]) -> ReplicaPlacement:
    """Replicate onto the entire eligible set; an empty set means no protection."""
    if owner in candidates:
        raise ValueError("owner cannot hold its own replica")
    return ReplicaPlacement(owner, frozenset(candidates))


def absorb(
    store: ReplicaStore, from_id: int, old: int | None, new: int
) -> ReplicaStore:
    """Fold a contributor's update into the store.

    XOR_PARITY keeps only one word of state, so replacing a contributor's
    earlier value requires that value back (old) to cancel it out of the
    parity. Supplying old for a first-time contributor, or omitting it for a
    repeat contributor, would silently corrupt the parity; both raise.
    """
    _check_word(new)
    if old is not None:
        _check_word(old)
    if store.mode is StoreMode.MULTI_REGISTER:
        store.registers[from_id] = new
        store.contributors.add(from_id)
        return store
    has_prior = from_id in store.contributors
    if has_prior and old is None:
        raise ValueError("parity update for a repeat contributor requires old word")
    if not has_prior and old is not None:
        raise ValueError("no prior word from this contributor to cancel")
    store.parity ^= (old if old is not None else 0) ^ new
    store.contributors.add(from_id)
    return store


def retire(store: ReplicaStore, contributor: int, last_word: int) -> ReplicaStore:
    """Drop a contributor whose word was recovered elsewhere.

    Cancels the word out of a parity so the register only covers live
    contributors. A register store just forgets the entry.
    """
    if contributor not in store.contributors:
        return store
    if store.mode is StoreMode.XOR_PARITY:
        store.parity ^= _check_word(last_word)
    else:
        store.registers.pop(contributor, None)
    store.contributors.discard(contributor)
    return store


def recover_multi(store: ReplicaStore, failed: int) -> int:
    """Read the failed contributor's register back."""
    if store.mode is not StoreMode.MULTI_REGISTER:
        raise ValueError("recover_multi needs a MULTI_REGISTER store")
    if failed not in store.registers:
        raise RecoveryFailed(f"no register for contributor {failed}")
    return store.registers[failed]


def recover_xor(store: ReplicaStore, failed: int, fresh: dict[int, int]) -> int:
    """Reconstruct the failed contributor's word from parity and fresh values.

    fresh must supply the current word of every other contributor; a missing
    one means that neighbor is unreachable and the reconstruction would be
    garbage, so the attempt fails loudly instead.
    """
    if store.mode is not StoreMode.XOR_PARITY:
        raise ValueError("recover_xor needs an XOR_PARITY store")
    if failed not in store.contributors:
        raise RecoveryFailed(f"{failed} never contributed to this parity")
    others = store.contributors - {failed}
    missing = others - set(fresh)
    if missing:
        raise RecoveryFailed(f"contributors unreachable: {sorted(missing)}")
    word = store.parity
    for k in others:
        word ^= _check_word(fresh[k])
    return word


def reliable_lifetime(lam: float, reliability: float) -> float:
    """Time horizon t with survival probability >= reliability: -(1/lam)*ln(R)."""
    if lam <= 0:
        raise ValueError("rate must be positive")
    if not (0.0 < reliability <= 1.0):
        raise ValueError("reliability must lie in (0, 1]")
    return -math.log(reliability) / lam
