"""Throughput-capacity Monte Carlo toolkit for random wireless multi-hop networks."""

from .capacity import (CapacityReport, expected_transmissions, min_transmissions,
                       report_from_stats, success_probabilities, throughput)
from .channel import (NO_FADING, RAYLEIGH, ChannelSpec, DegenerateGeometryError,
                      FadingField, draw_fading, interference, success)
from .geometry import NetworkInstance, distance, place_nodes
from .mac import MacSpec, TransmitterSet, elect_aloha, elect_coloring, elect_csma
from .simulator import LinkStats, activity_rate, run_slots
from .sweep import (SchemeComparison, SweepPlan, SweepResult, compare_schemes,
                    fit_scaling, run_sweep)

__version__ = "0.1.0"

__all__ = [
    "CapacityReport", "ChannelSpec", "DegenerateGeometryError", "FadingField",
    "LinkStats", "MacSpec", "NetworkInstance", "NO_FADING", "RAYLEIGH",
    "SchemeComparison", "SweepPlan", "SweepResult", "TransmitterSet",
    "activity_rate", "compare_schemes", "distance", "draw_fading",
    "elect_aloha", "elect_coloring", "elect_csma", "expected_transmissions",
    "fit_scaling", "interference", "min_transmissions", "place_nodes",
    "report_from_stats", "run_slots", "run_sweep", "success",
    "success_probabilities", "throughput",
]
