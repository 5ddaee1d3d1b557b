"""Monte Carlo parameter sweeps: estimate capacity curves and locate optima.

A sweep runs samples x grid-points independent simulations. Network
instances are drawn once per sample and shared across grid points (common
random numbers keep the argmax location stable); MAC and fading streams are
fresh per (grid point, sample). Aggregation is a deterministic reduction in
fixed index order, so results do not depend on worker scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .capacity import report_from_stats
from .channel import ChannelSpec, DegenerateGeometryError
from .geometry import NetworkInstance, place_nodes
from .mac import PARAM_NAMES, MacSpec, SCHEMES
from .simulator import DEFAULT_SLOTS, run_slots

log = logging.getLogger(__name__)

DEFAULT_SAMPLES = 100
DEFAULT_RADIUS = 1.0
DEFAULT_GRID_POINTS = 16

# domain-separation tags for derived seeds
_TAG_INSTANCE = 0
_TAG_RUN = 1

CSV_HEADER = [
    "scheme", "n", "k_threshold", "alpha", "fading", "parameter",
    "mean_zeta", "se_zeta", "disconnect_frac", "mean_sum_omega",
    "samples", "t_slots", "master_seed",
]


def derive_seed(master_seed: int, *path: int) -> int:
    """64-bit seed derived injectively from the master seed and an index path."""
    ss = np.random.SeedSequence([int(master_seed), *[int(x) for x in path]])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class SweepPlan:
    scheme: str
    grid: tuple[float, ...]        # strictly increasing parameter values
    n_nodes: int
    channel: ChannelSpec
    samples: int = DEFAULT_SAMPLES
    t_slots: int = DEFAULT_SLOTS
    master_seed: int = 0
    disk_radius: float = DEFAULT_RADIUS

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        grid = tuple(float(v) for v in self.grid)
        if len(grid) == 0:
            raise ValueError("grid must be non-empty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid must be strictly increasing")
        for value in grid:
            MacSpec(self.scheme, value)  # reuse the per-scheme range checks
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.t_slots < 1:
            raise ValueError(f"t_slots must be >= 1, got {self.t_slots}")
        if self.n_nodes < 2:
            raise ValueError(f"n_nodes must be >= 2, got {self.n_nodes}")
        object.__setattr__(self, "grid", grid)

    @property
    def param_name(self) -> str:
        return PARAM_NAMES[self.scheme]

    def to_record(self) -> dict:
        return {
            "scheme": self.scheme,
            "grid": list(self.grid),
            "n": self.n_nodes,
            "fading": self.channel.fading,
            "alpha": self.channel.alpha,
            "k_threshold": self.channel.k_threshold,
            "samples": self.samples,
            "t_slots": self.t_slots,
            "seed": self.master_seed,
            "radius": self.disk_radius,
        }


@dataclass
class SweepResult:
    plan: SweepPlan
    mean_zeta: np.ndarray        # per grid point
    se_zeta: np.ndarray          # standard error of the mean, 0 for 1 sample
    disconnect_frac: np.ndarray  # fraction of samples with zero capacity
    mean_sum_omega: np.ndarray
    argmax_param: float
    argmax_zeta: float

    def to_record(self) -> dict:
        return {
            "plan": self.plan.to_record(),
            "parameter_name": self.plan.param_name,
            "grid": list(self.plan.grid),
            "mean_zeta": [float(v) for v in self.mean_zeta],
            "se_zeta": [float(v) for v in self.se_zeta],
            "disconnect_frac": [float(v) for v in self.disconnect_frac],
            "mean_sum_omega": [float(v) for v in self.mean_sum_omega],
            "argmax": {"parameter": self.argmax_param, "zeta": self.argmax_zeta},
        }

    def csv_rows(self) -> list[list]:
        """One frozen-schema row per grid point (see CSV_HEADER)."""
        plan = self.plan
        rows = []
        for g, value in enumerate(plan.grid):
            rows.append([
                plan.scheme, plan.n_nodes, plan.channel.k_threshold,
                plan.channel.alpha, plan.channel.fading, value,
                float(self.mean_zeta[g]), float(self.se_zeta[g]),
                float(self.disconnect_frac[g]), float(self.mean_sum_omega[g]),
                plan.samples, plan.t_slots, plan.master_seed,
            ])
        return rows


def sample_instance(plan: SweepPlan, sample_idx: int, max_retries: int = 3) -> NetworkInstance:
    """Instance for one sample, re-drawn (bounded) if the geometry is degenerate."""
    for retry in range(max_retries + 1):
        seed = derive_seed(plan.master_seed, _TAG_INSTANCE, sample_idx, retry)
        net = place_nodes(plan.n_nodes, plan.disk_radius, seed)
        dm = net.distance_matrix
        degenerate = bool(np.any(dm[~np.eye(net.n, dtype=bool)] == 0.0))
        if not degenerate:
            return net
        log.warning("degenerate instance for sample %d (retry %d), re-drawing",
                    sample_idx, retry)
    raise DegenerateGeometryError(
        f"sample {sample_idx} still degenerate after {max_retries} retries"
    )


# Instances are shared across grid points within a sweep; keep the most
# recent ones (and their cached distance matrices) instead of re-placing.
_cached_instance = lru_cache(maxsize=2)(sample_instance)


def _run_cell(plan: SweepPlan, grid_idx: int, sample_idx: int) -> tuple[float, bool, float]:
    """(zeta, connected, sum_omega) for one grid point x sample."""
    net = _cached_instance(plan, sample_idx)
    mac = MacSpec(plan.scheme, plan.grid[grid_idx])
    run_seed = derive_seed(plan.master_seed, _TAG_RUN, grid_idx, sample_idx)
    stats = run_slots(net, plan.channel, mac, plan.t_slots, run_seed)
    report = report_from_stats(stats)
    return report.zeta, report.connected, report.sum_omega


def _run_cell_args(args: tuple[SweepPlan, int, int]) -> tuple[float, bool, float]:
    return _run_cell(*args)


def run_sweep(plan: SweepPlan, workers: int = 1) -> SweepResult:
    """Run the full grid x samples matrix and aggregate per grid point."""
    n_grid = len(plan.grid)
    # sample-major order so each instance is reused across all grid points
    cells = [(plan, g, s) for s in range(plan.samples) for g in range(n_grid)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell_args, cells, chunksize=1))
    else:
        outcomes = []
        for idx, cell in enumerate(cells):
            outcomes.append(_run_cell_args(cell))
            log.info("sweep %s n=%d: cell %d/%d done",
                     plan.scheme, plan.n_nodes, idx + 1, len(cells))

    # rows: samples, cols: grid points -> transpose to grid-major
    zeta = np.array([z for z, _, _ in outcomes]).reshape(plan.samples, n_grid).T
    connected = np.array([c for _, c, _ in outcomes]).reshape(plan.samples, n_grid).T
    sum_omega = np.array([w for _, _, w in outcomes]).reshape(plan.samples, n_grid).T

    mean_zeta = zeta.mean(axis=1)
    if plan.samples > 1:
        se_zeta = zeta.std(axis=1, ddof=1) / np.sqrt(plan.samples)
    else:
        se_zeta = np.zeros(n_grid)
    disconnect_frac = 1.0 - connected.mean(axis=1)
    mean_sum_omega = sum_omega.mean(axis=1)

    best = int(np.argmax(mean_zeta))  # first max wins: ties break to smaller parameter
    return SweepResult(
        plan=plan,
        mean_zeta=mean_zeta,
        se_zeta=se_zeta,
        disconnect_frac=disconnect_frac,
        mean_sum_omega=mean_sum_omega,
        argmax_param=float(plan.grid[best]),
        argmax_zeta=float(mean_zeta[best]),
    )


def fit_scaling(points: list[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares fit of zeta = c2 * sqrt(n / ln n) through the origin.

    Returns (c2, RMS relative residual), residuals taken relative to the
    observed values. Needs at least two points with distinct n, all with
    positive zeta.
    """
    if len(points) < 2:
        raise ValueError("need at least 2 points to fit")
    n_values = np.array([float(n) for n, _ in points])
    zeta_values = np.array([float(z) for _, z in points])
    if len(set(n_values.tolist())) < 2:
        raise ValueError("need at least 2 distinct n values")
    if np.any(n_values <= 1):
        raise ValueError("n values must exceed 1")
    if np.any(zeta_values <= 0):
        raise ValueError("zeta values must be positive")
    x = np.sqrt(n_values / np.log(n_values))
    c2 = float(np.dot(x, zeta_values) / np.dot(x, x))
    rel = (zeta_values - c2 * x) / zeta_values
    return c2, float(np.sqrt(np.mean(rel ** 2)))


@dataclass
class SchemeComparison:
    results: dict[str, SweepResult]            # keyed by scheme
    optima: dict[str, tuple[float, float]]     # scheme -> (parameter*, zeta*)
    ratios: dict[str, float] = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "optima": {
                scheme: {"parameter": param, "zeta": zeta}
                for scheme, (param, zeta) in self.optima.items()
            },
            "ratios": dict(self.ratios),
            "sweeps": {scheme: res.to_record() for scheme, res in self.results.items()},
        }


def compare_schemes(plans: dict[str, SweepPlan], workers: int = 1) -> SchemeComparison:
    """Sweep several schemes at identical (n, channel) and compare their optima."""
    if not plans:
        raise ValueError("no plans given")
    reference = next(iter(plans.values()))
    for scheme, plan in plans.items():
        if plan.scheme != scheme:
            raise ValueError(f"plan keyed {scheme!r} is for scheme {plan.scheme!r}")
        if plan.n_nodes != reference.n_nodes or plan.channel != reference.channel:
            raise ValueError("all plans must share n_nodes and channel spec")

    results = {scheme: run_sweep(plan, workers=workers) for scheme, plan in plans.items()}
    optima = {s: (r.argmax_param, r.argmax_zeta) for s, r in results.items()}
    ratios = {}
    schemes = list(results)
    for i, a in enumerate(schemes):
        for b in schemes[i + 1:]:
            za, zb = optima[a][1], optima[b][1]
            ratios[f"{a}_over_{b}"] = za / zb if zb > 0 else float("inf")
    return SchemeComparison(results=results, optima=optima, ratios=ratios)


def linear_grid(lo: float, hi: float, points: int = DEFAULT_GRID_POINTS) -> tuple[float, ...]:
    return tuple(np.linspace(lo, hi, points).tolist())


def log_grid(lo: float, hi: float, points: int = DEFAULT_GRID_POINTS) -> tuple[float, ...]:
    if lo <= 0:
        raise ValueError("log grid needs positive endpoints")
    return tuple(np.geomspace(lo, hi, points).tolist())
