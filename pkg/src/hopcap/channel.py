"""Channel gains, per-slot fading, interference sums and the SIR success test.

Received power for the ordered pair (i, j) is F_ij * |z_i - z_j|**-alpha with
unit transmit power. Background noise is hard-coded to zero, so a transmission
with zero interference always succeeds and the whole model is invariant under
uniform spatial scaling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import NetworkInstance

NO_FADING = "none"
RAYLEIGH = "rayleigh"

FADING_MODES = (NO_FADING, RAYLEIGH)


class DegenerateGeometryError(RuntimeError):
    """Two distinct nodes coincide; the sample cannot be evaluated."""


@dataclass(frozen=True)
class ChannelSpec:
    fading: str          # "none" | "rayleigh"
    alpha: float         # attenuation coefficient, > 2
    k_threshold: float   # minimum SIR for successful reception, > 0

    def __post_init__(self):
        if self.fading not in FADING_MODES:
            raise ValueError(f"fading must be one of {FADING_MODES}, got {self.fading!r}")
        if not self.alpha > 2:
            raise ValueError(f"alpha must be > 2, got {self.alpha}")
        if not self.k_threshold > 0:
            raise ValueError(f"k_threshold must be positive, got {self.k_threshold}")


class FadingField:
    """Per-slot fading factors for ordered (transmitter, receiver) pairs."""

    def factor(self, i: int, j: int) -> float:
        raise NotImplementedError

    def factors_from(self, i: int, receivers: np.ndarray) -> np.ndarray:
        """Factors for transmitter i at each of the given receivers."""
        raise NotImplementedError


class UnitFadingField(FadingField):
    """No fading: every factor is exactly 1."""

    def factor(self, i, j):
        return 1.0

    def factors_from(self, i, receivers):
        return np.ones(len(receivers))


class PairFadingField(FadingField):
    """Factors drawn for an explicit set of ordered pairs, nothing else.

    Asking for a pair that was never drawn is an error: election and success
    evaluation must only touch the pairs they were given.
    """

    def __init__(self, factors: dict[tuple[int, int], float]):
        self._factors = factors

    def factor(self, i, j):
        try:
            return self._factors[(int(i), int(j))]
        except KeyError:
            raise KeyError(f"no fading factor was drawn for pair ({i}, {j})") from None

    def factors_from(self, i, receivers):
        return np.array([self.factor(i, j) for j in receivers])


class RowFadingField(FadingField):
    """Rayleigh factors drawn lazily, one full receiver row per transmitter.

    Rows are drawn on first access, so the RNG stream is consumed in
    first-access order (admission order inside a slot). Statistically
    identical to drawing all n*n factors up front, at ~n/|S| of the cost.
    """

    def __init__(self, n: int, rng: np.random.Generator):
        self._n = n
        self._rng = rng
        self._rows: dict[int, np.ndarray] = {}

    def _row(self, i: int) -> np.ndarray:
        i = int(i)
        row = self._rows.get(i)
        if row is None:
            row = self._rng.standard_exponential(self._n)
            self._rows[i] = row
        return row

    def factor(self, i, j):
        return float(self._row(i)[int(j)])

    def factors_from(self, i, receivers):
        return self._row(i)[receivers]


def draw_fading(spec: ChannelSpec, pairs: Iterable[tuple[int, int]],
                rng: np.random.Generator) -> FadingField:
    """Draw one fading factor per requested ordered pair for one slot.

    No-fading specs return the all-ones field without consuming randomness.
    Rayleigh factors are i.i.d. exponential with mean 1, drawn in the
    iteration order of `pairs`.
    """
    if spec.fading == NO_FADING:
        return UnitFadingField()
    pair_list = [(int(i), int(j)) for i, j in pairs]
    draws = rng.standard_exponential(len(pair_list))
    return PairFadingField(dict(zip(pair_list, draws)))


def slot_fading(spec: ChannelSpec, n: int, rng: np.random.Generator) -> FadingField:
    """Fresh fading field for one slot of an n-node network (simulator fast path)."""
    if spec.fading == NO_FADING:
        return UnitFadingField()
    return RowFadingField(n, rng)


def _checked_distances(net: NetworkInstance, j: int, others: np.ndarray) -> np.ndarray:
    diff = net.positions[others] - net.positions[j]
    dist = np.hypot(diff[:, 0], diff[:, 1])
    if np.any(dist == 0.0):
        culprit = int(others[np.argmin(dist)])
        raise DegenerateGeometryError(
            f"nodes {culprit} and {j} coincide; sample cannot be evaluated"
        )
    return dist


def interference(net: NetworkInstance, field: FadingField, spec: ChannelSpec,
                 transmitters: Sequence[int], receiver: int, excluding: int) -> float:
    """Summed received power at `receiver` from all transmitters except `excluding`."""
    others = np.asarray([k for k in transmitters if k != excluding], dtype=np.intp)
    if others.size == 0:
        return 0.0
    dist = _checked_distances(net, receiver, others)
    factors = np.array([field.factor(k, receiver) for k in others])
    return float(np.sum(factors * dist ** (-spec.alpha)))


def success(net: NetworkInstance, field: FadingField, spec: ChannelSpec,
            transmitters: Sequence[int], i: int, j: int) -> bool:
    """SIR success test for the transmission i -> j against the other transmitters.

    Zero interference means success: background noise is zero, so a lone
    transmitter is always received.
    """
    if i == j:
        raise ValueError("transmitter and receiver must differ")
    dist = _checked_distances(net, j, np.asarray([i], dtype=np.intp))[0]
    signal = field.factor(i, j) * dist ** (-spec.alpha)
    interf = interference(net, field, spec, transmitters, j, excluding=i)
    return bool(signal >= spec.k_threshold * interf)
