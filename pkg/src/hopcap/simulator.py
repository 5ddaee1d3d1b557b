"""Slot-loop simulation: accumulate per-link attempt/success counts.

Each slot elects a transmitter set, draws fresh fading, and lets every
transmitter broadcast to every silent node. Receivers that are themselves
transmitting are skipped entirely (half-duplex): such a slot counts as no
attempt on that ordered pair, not as a failure, so the measured per-link
success ratio estimates the per-transmission probability that the
retransmission count 1/p assumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import ChannelSpec, DegenerateGeometryError, UnitFadingField, slot_fading
from .geometry import NetworkInstance
from .mac import MacSpec, TransmitterSet, elect

DEFAULT_SLOTS = 25000


@dataclass
class LinkStats:
    """Counters over a run of total_slots slots."""

    attempts: np.ndarray      # (n, n) int64, ordered pairs, diagonal unused
    successes: np.ndarray     # (n, n) int64
    active_slots: np.ndarray  # (n,) int64
    total_slots: int

    @property
    def n(self) -> int:
        return self.attempts.shape[0]

    def validate(self) -> None:
        """Raise if any counter invariant is violated."""
        if np.any(self.successes > self.attempts):
            raise AssertionError("successes exceed attempts on some link")
        if np.any(self.attempts > self.active_slots[:, None]):
            raise AssertionError("attempts exceed the transmitter's active slots")
        if np.any(self.active_slots > self.total_slots):
            raise AssertionError("active slots exceed total slots")
        if np.any(self.attempts < 0) or np.any(self.active_slots < 0):
            raise AssertionError("negative counter")

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "t_slots": int(self.total_slots),
            "attempts": [int(v) for v in self.attempts.ravel(order="C")],
            "successes": [int(v) for v in self.successes.ravel(order="C")],
            "active_slots": [int(v) for v in self.active_slots],
        }

    @classmethod
    def from_record(cls, record: dict) -> "LinkStats":
        n = int(record["n"])
        shape = (n, n)
        return cls(
            attempts=np.asarray(record["attempts"], dtype=np.int64).reshape(shape),
            successes=np.asarray(record["successes"], dtype=np.int64).reshape(shape),
            active_slots=np.asarray(record["active_slots"], dtype=np.int64),
            total_slots=int(record["t_slots"]),
        )


def _as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def gain_matrix(net: NetworkInstance, alpha: float) -> np.ndarray:
    """No-fading received power |z_i - z_j|**-alpha for every ordered pair.

    Diagonal entries are zeroed (never evaluated). Distinct coincident nodes
    make the sample unusable and abort instead of being perturbed.
    """
    dm = net.distance_matrix
    off_diag = ~np.eye(net.n, dtype=bool)
    if np.any(dm[off_diag] == 0.0):
        i, j = np.argwhere((dm == 0.0) & off_diag)[0]
        raise DegenerateGeometryError(
            f"nodes {int(i)} and {int(j)} coincide; sample cannot be evaluated"
        )
    with np.errstate(divide="ignore"):
        gains = dm ** (-alpha)
    np.fill_diagonal(gains, 0.0)
    return gains


def run_slots(net: NetworkInstance, spec: ChannelSpec, mac: MacSpec, t_slots: int,
              rng: "int | np.random.SeedSequence",
              on_slot: Callable[[TransmitterSet], None] | None = None) -> LinkStats:
    """Simulate t_slots slots and return the accumulated counters.

    `rng` is a seed (int or SeedSequence); two child streams are derived from
    it, one for MAC elections and one for fading, so fading-independent
    schemes elect identical sets under both channel models.
    """
    if t_slots < 1:
        raise ValueError(f"t_slots must be >= 1, got {t_slots}")
    mac_ss, fading_ss = _as_seed_sequence(rng).spawn(2)
    mac_rng = np.random.default_rng(mac_ss)
    fading_rng = np.random.default_rng(fading_ss)

    n = net.n
    gains = gain_matrix(net, spec.alpha)
    k = spec.k_threshold
    attempts = np.zeros((n, n), dtype=np.int64)
    successes = np.zeros((n, n), dtype=np.int64)
    active = np.zeros(n, dtype=np.int64)
    all_nodes = np.arange(n)

    for t in range(t_slots):
        field = slot_fading(spec, n, fading_rng)
        elected = elect(net, mac, spec, field, mac_rng, slot=t)
        members = elected.members
        if on_slot is not None:
            on_slot(elected)
        if members.size == 0:
            continue
        active[members] += 1
        if members.size == n:
            continue
        silent_mask = np.ones(n, dtype=bool)
        silent_mask[members] = False
        receivers = all_nodes[silent_mask]

        powers = gains[np.ix_(members, receivers)]
        if not isinstance(field, UnitFadingField):
            fading = np.stack([field.factors_from(i, receivers) for i in members])
            powers = powers * fading
        total = powers.sum(axis=0)
        interf = total[None, :] - powers
        ok = powers >= k * interf  # interf == 0 implies success (zero noise)

        cell = np.ix_(members, receivers)
        attempts[cell] += 1
        successes[cell] += ok

    stats = LinkStats(attempts=attempts, successes=successes, active_slots=active,
                      total_slots=int(t_slots))
    stats.validate()
    return stats


def activity_rate(stats: LinkStats) -> np.ndarray:
    """Fraction of slots each node spent transmitting."""
    if stats.total_slots < 1:
        raise ValueError("total_slots must be >= 1")
    return stats.active_slots / stats.total_slots
