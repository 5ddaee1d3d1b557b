"""Capacity quantities derived from link statistics.

Pipeline: per-link success probabilities -> expected transmissions per link
(reciprocal, unusable links become infinite) -> minimum expected
transmissions over any relay path (all-pairs shortest paths) -> network
throughput capacity. A single unreachable ordered pair collapses the
capacity to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .simulator import LinkStats, activity_rate


@dataclass
class CapacityReport:
    p_matrix: np.ndarray   # (n, n) success probabilities
    t_matrix: np.ndarray   # (n, n) expected transmissions, inf allowed
    m_matrix: np.ndarray   # (n, n) minimum expected transmissions, inf allowed
    omega: np.ndarray      # (n,) per-node activity rates
    zeta: float            # throughput capacity (bound), 0 when disconnected
    connected: bool

    @property
    def n(self) -> int:
        return self.p_matrix.shape[0]

    @property
    def sum_omega(self) -> float:
        return float(self.omega.sum())

    @property
    def sum_m(self) -> float:
        # inf when disconnected
        return float(self.m_matrix.sum())

    def to_record(self, summary: bool = False) -> dict:
        record = {
            "n": self.n,
            "zeta": self.zeta,
            "connected": self.connected,
            "sum_omega": self.sum_omega,
            "sum_m": None if not np.isfinite(self.sum_m) else self.sum_m,
        }
        if not summary:
            record["omega"] = [float(v) for v in self.omega]
            record["p_matrix"] = _matrix_to_lists(self.p_matrix)
            record["t_matrix"] = _matrix_to_lists(self.t_matrix)
            record["m_matrix"] = _matrix_to_lists(self.m_matrix)
        return record


def _matrix_to_lists(matrix: np.ndarray) -> list:
    # infinities encoded as null for strict-JSON consumers
    return [[None if not np.isfinite(v) else float(v) for v in row] for row in matrix]


def success_probabilities(stats: LinkStats) -> np.ndarray:
    """Per-link empirical success probability; never-attempted links get 0."""
    attempts = stats.attempts
    probs = np.zeros_like(attempts, dtype=np.float64)
    np.divide(stats.successes, attempts, out=probs, where=attempts > 0)
    return probs


def expected_transmissions(p_matrix: np.ndarray) -> np.ndarray:
    """Elementwise 1/p with 1/0 = inf. Diagonal is meaningless and left as inf."""
    p = np.asarray(p_matrix, dtype=np.float64)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("probabilities must lie in [0, 1]")
    t = np.full_like(p, np.inf)
    np.divide(1.0, p, out=t, where=p > 0)
    return t


def min_transmissions(t_matrix: np.ndarray) -> np.ndarray:
    """Least fixed point of m[i,j] = min_k(m[i,k] + t[k,j]) with zero diagonal.

    Equivalently all-pairs shortest paths on the directed graph whose edge
    k -> j costs t[k,j]; infinite edges are omitted. Computed by per-source
    Dijkstra (the cubic fixpoint iteration lives in the test suite as an
    independent oracle).
    """
    t = np.asarray(t_matrix, dtype=np.float64)
    n = t.shape[0]
    if t.shape != (n, n):
        raise ValueError(f"t_matrix must be square, got {t.shape}")
    if np.any(t < 0):
        raise ValueError("t_matrix entries must be nonnegative")
    edge_mask = np.isfinite(t) & ~np.eye(n, dtype=bool)
    rows, cols = np.nonzero(edge_mask)
    graph = csr_matrix((t[rows, cols], (rows, cols)), shape=(n, n))
    m = dijkstra(graph, directed=True)
    np.fill_diagonal(m, 0.0)
    return m


def throughput(m_matrix: np.ndarray, omega: np.ndarray) -> tuple[float, bool]:
    """Network throughput capacity from path costs and activity rates.

    Any unreachable ordered pair means an isolated region, and the capacity
    collapses to zero. Otherwise:

        zeta = (n - 1) * n * sum(omega) / sum(m)
    """
    m = np.asarray(m_matrix, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    n = m.shape[0]
    off_diag = ~np.eye(n, dtype=bool)
    if not np.all(np.isfinite(m[off_diag])):
        return 0.0, False
    zeta = (n - 1) * n * float(omega.sum()) / float(m.sum())
    return zeta, True


def report_from_stats(stats: LinkStats) -> CapacityReport:
    """Full capacity report for one finished run."""
    p = success_probabilities(stats)
    t = expected_transmissions(p)
    m = min_transmissions(t)
    omega = activity_rate(stats)
    zeta, connected = throughput(m, omega)
    return CapacityReport(p_matrix=p, t_matrix=t, m_matrix=m, omega=omega,
                          zeta=zeta, connected=connected)
