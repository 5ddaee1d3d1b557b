"""Random network instances: uniform node placement on a planar disk."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class NetworkInstance:
    """N node positions on a disk of radius `disk_radius`, regenerable from `seed`."""

    positions: np.ndarray  # (n, 2) float64, read-only
    disk_radius: float
    seed: int

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
        if pos.shape[0] < 2:
            raise ValueError("a network needs at least 2 nodes")
        radii = np.hypot(pos[:, 0], pos[:, 1])
        # 1-ulp slack: |z| is reconstructed from polar coordinates
        if np.any(radii > self.disk_radius * (1.0 + 1e-12)):
            raise ValueError("positions must lie within disk_radius of the origin")
        pos = pos.copy()
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        # internal cache, not part of the observable contract
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        dm = np.hypot(diff[..., 0], diff[..., 1])
        dm.setflags(write=False)
        return dm

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "radius": float(self.disk_radius),
            "seed": int(self.seed),
            "positions": [[float(x), float(y)] for x, y in self.positions],
        }

    @classmethod
    def from_record(cls, record: dict) -> "NetworkInstance":
        net = cls(
            positions=np.asarray(record["positions"], dtype=np.float64),
            disk_radius=float(record["radius"]),
            seed=int(record["seed"]),
        )
        if net.n != int(record["n"]):
            raise ValueError("record field 'n' disagrees with the position list")
        return net


def place_nodes(n: int, radius: float, seed: int) -> NetworkInstance:
    """Drop n nodes i.i.d. uniform over the disk of given radius.

    Sampling is by inverse CDF on the radial coordinate (radius * sqrt(U),
    uniform angle), so identical (n, radius, seed) give bit-identical
    coordinates on any platform.
    """
    if n < 2:
        raise ValueError(f"need n >= 2 nodes, got {n}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    rng = np.random.default_rng(seed)
    rho = radius * np.sqrt(rng.random(n))
    phi = rng.random(n) * (2.0 * np.pi)
    positions = np.column_stack((rho * np.cos(phi), rho * np.sin(phi)))
    return NetworkInstance(positions=positions, disk_radius=float(radius), seed=int(seed))


def distance(net: NetworkInstance, i: int, j: int) -> float:
    """Euclidean distance between nodes i and j."""
    n = net.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range: ({i}, {j}) for n={n}")
    dx = net.positions[i, 0] - net.positions[j, 0]
    dy = net.positions[i, 1] - net.positions[j, 1]
    return float(np.hypot(dx, dy))
