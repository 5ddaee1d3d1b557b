"""Per-slot election of the simultaneous transmitter set.

Three schemes, each with one tuning parameter:

* aloha     -- every node transmits independently with probability p
* coloring  -- random maximal set with pairwise spacing >= d (TDMA-style
               spatial exclusion)
* csma      -- nodes admitted in random back-off order; a candidate is
               dropped once the summed signal it senses from already
               admitted transmitters reaches theta

Every slot draws a fresh set; elections are order-dependent, so each one
runs sequentially on its own RNG stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelSpec, DegenerateGeometryError, FadingField
from .geometry import NetworkInstance

SCHEMES = ("aloha", "coloring", "csma")

# parameter symbol per scheme, used in CSV/JSON output and CLI validation
PARAM_NAMES = {"aloha": "p", "coloring": "d", "csma": "theta"}


@dataclass(frozen=True)
class MacSpec:
    scheme: str   # "aloha" | "coloring" | "csma"
    param: float  # p, d or theta depending on the scheme

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.scheme == "aloha" and not 0.0 <= self.param <= 1.0:
            raise ValueError(f"aloha probability must be in [0, 1], got {self.param}")
        if self.scheme in ("coloring", "csma") and not self.param > 0:
            raise ValueError(
                f"{PARAM_NAMES[self.scheme]} must be positive, got {self.param}"
            )

    @classmethod
    def aloha(cls, p: float) -> "MacSpec":
        return cls("aloha", float(p))

    @classmethod
    def coloring(cls, d: float) -> "MacSpec":
        return cls("coloring", float(d))

    @classmethod
    def csma(cls, theta: float) -> "MacSpec":
        return cls("csma", float(theta))

    @property
    def param_name(self) -> str:
        return PARAM_NAMES[self.scheme]


@dataclass(frozen=True)
class TransmitterSet:
    """Elected transmitters in admission order."""

    members: np.ndarray  # node indices, no duplicates
    slot: int = 0

    def __post_init__(self):
        members = np.asarray(self.members, dtype=np.intp)
        members.setflags(write=False)
        object.__setattr__(self, "members", members)

    @property
    def size(self) -> int:
        return self.members.size


def elect_aloha(net: NetworkInstance, p: float, rng: np.random.Generator,
                slot: int = 0) -> TransmitterSet:
    """Independent Bernoulli(p) transmit decision per node."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    mask = rng.random(net.n) < p
    return TransmitterSet(members=np.flatnonzero(mask), slot=slot)


def elect_coloring(net: NetworkInstance, d: float, rng: np.random.Generator,
                   slot: int = 0) -> TransmitterSet:
    """Random maximal set with pairwise distance >= d.

    Repeatedly pick a uniform random candidate, admit it, and discard every
    remaining candidate closer than d to it. Admission stops only when no
    candidate is left, which makes the set maximal: every non-member is
    within d of some member.
    """
    if not d > 0:
        raise ValueError(f"d must be positive, got {d}")
    pos = net.positions
    candidates = np.arange(net.n)
    members = []
    while candidates.size:
        pick = candidates[rng.integers(candidates.size)]
        members.append(pick)
        diff = pos[candidates] - pos[pick]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        candidates = candidates[(dist >= d) & (candidates != pick)]
    return TransmitterSet(members=np.asarray(members, dtype=np.intp), slot=slot)


def elect_csma(net: NetworkInstance, theta: float, spec: ChannelSpec,
               field: FadingField, rng: np.random.Generator,
               slot: int = 0) -> TransmitterSet:
    """Sequential admission in random back-off order with carrier sensing.

    A candidate senses the summed received power from all transmitters
    admitted so far and is discarded once that sum reaches theta. Admitted
    transmitters never re-evaluate the medium, so later admissions cannot
    evict earlier ones. Sensing uses the slot's fading field, one factor per
    ordered pair, the same realization later used for data reception.
    """
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    pos = net.positions
    alpha = spec.alpha
    candidates = np.arange(net.n)
    sensed = np.zeros(net.n)
    members = []
    while candidates.size:
        pick = candidates[rng.integers(candidates.size)]
        members.append(pick)
        candidates = candidates[candidates != pick]
        if candidates.size == 0:
            break
        diff = pos[candidates] - pos[pick]
        dist = np.hypot(diff[:, 0], diff[:, 1])
        if np.any(dist == 0.0):
            culprit = int(candidates[np.argmin(dist)])
            raise DegenerateGeometryError(
                f"nodes {int(pick)} and {culprit} coincide; sample cannot be evaluated"
            )
        sensed[candidates] += field.factors_from(pick, candidates) * dist ** (-alpha)
        candidates = candidates[sensed[candidates] < theta]
    return TransmitterSet(members=np.asarray(members, dtype=np.intp), slot=slot)


def elect(net: NetworkInstance, mac: MacSpec, spec: ChannelSpec,
          field: FadingField, rng: np.random.Generator, slot: int = 0) -> TransmitterSet:
    """Dispatch to the scheme named by `mac`."""
    if mac.scheme == "aloha":
        return elect_aloha(net, mac.param, rng, slot=slot)
    if mac.scheme == "coloring":
        return elect_coloring(net, mac.param, rng, slot=slot)
    return elect_csma(net, mac.param, spec, field, rng, slot=slot)
