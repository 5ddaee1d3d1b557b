"""Command-line front end: single runs, parameter sweeps, scheme comparisons.

Output files are written atomically and embed the fully-resolved
computation config, so any result can be reproduced byte-for-byte
(timestamp aside) by rerunning from that embedded config. Progress goes to
stderr; stdout carries exactly one machine-parsable summary line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from dataclasses import dataclass

from .capacity import report_from_stats
from .channel import FADING_MODES, ChannelSpec
from .geometry import place_nodes
from .mac import PARAM_NAMES, SCHEMES, MacSpec
from .simulator import run_slots
from .sweep import (CSV_HEADER, DEFAULT_GRID_POINTS, SweepPlan, compare_schemes,
                    linear_grid, log_grid, run_sweep)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
THREADS_ENV = "HOPCAP_THREADS"

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


class ConfigError(ValueError):
    """Invalid command line or config file."""


@dataclass
class RunConfig:
    command: str                       # simulate | sweep | compare
    scheme: str | None = None
    p: float | None = None
    d: float | None = None
    theta: float | None = None
    n: int | None = None
    k: float = 20.0
    alpha: float = 4.0
    fading: str = "none"
    radius: float = 1.0
    slots: int = 25000
    samples: int = 100
    seed: int = 0
    grid: list[float] | None = None
    p_grid: list[float] | None = None
    d_grid: list[float] | None = None
    theta_grid: list[float] | None = None
    out: str | None = None
    csv_path: str | None = None
    threads: int = 1
    verbose: bool = False
    dump_matrices: bool = False
    dump_transmitters: str | None = None

    def channel_spec(self) -> ChannelSpec:
        return ChannelSpec(fading=self.fading, alpha=self.alpha, k_threshold=self.k)


# config-file key -> (RunConfig attribute, expected type)
_CONFIG_KEYS = {
    "scheme": ("scheme", str),
    "p": ("p", float),
    "d": ("d", float),
    "theta": ("theta", float),
    "n": ("n", int),
    "k": ("k", float),
    "alpha": ("alpha", float),
    "fading": ("fading", str),
    "radius": ("radius", float),
    "slots": ("slots", int),
    "samples": ("samples", int),
    "seed": ("seed", int),
    "grid": ("grid", list),
    "p_grid": ("p_grid", list),
    "d_grid": ("d_grid", list),
    "theta_grid": ("theta_grid", list),
    "threads": ("threads", int),
}


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env is not None:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _parse_grid_text(text: str, scheme: str) -> list[float]:
    """Grid syntax: 'lo:hi[:points]' (linear for p/d, log for theta) or 'v1,v2,...'."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise ValueError
            lo, hi = float(parts[0]), float(parts[1])
            points = int(parts[2]) if len(parts) == 3 else DEFAULT_GRID_POINTS
            maker = log_grid if scheme == "csma" else linear_grid
            return list(maker(lo, hi, points))
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse grid {text!r}; use 'lo:hi[:points]' or 'v1,v2,...'") from None


_DEFAULT_GRIDS = {
    "aloha": lambda: list(linear_grid(0.01, 0.2, DEFAULT_GRID_POINTS)),
    "coloring": lambda: list(linear_grid(0.1, 2.0, DEFAULT_GRID_POINTS)),
    "csma": lambda: list(log_grid(0.1, 1000.0, DEFAULT_GRID_POINTS)),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hopcap",
        description="Monte Carlo throughput-capacity estimation for random "
                    "wireless multi-hop networks",
    )
    sub = parser.add_subparsers(dest="command")

    def add_common(p: argparse.ArgumentParser, with_samples: bool):
        p.add_argument("--config", help="flat JSON config file; flags override its values")
        p.add_argument("--n", type=int, default=None, help="number of nodes")
        p.add_argument("--k", type=float, default=None, help="SIR threshold (default 20)")
        p.add_argument("--alpha", type=float, default=None,
                       help="attenuation coefficient, > 2 (default 4)")
        p.add_argument("--fading", choices=FADING_MODES, default=None,
                       help="channel model (default none)")
        p.add_argument("--radius", type=float, default=None, help="disk radius (default 1)")
        p.add_argument("--slots", type=int, default=None,
                       help="slots per run (default 25000)")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        if with_samples:
            p.add_argument("--samples", type=int, default=None,
                           help="independent node placements (default 100)")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker processes (default: ${THREADS_ENV} or cpu count)")
        p.add_argument("--out", default=None, help="write JSON output here")
        p.add_argument("--verbose", action="store_true", default=None,
                       help="progress logging on stderr")

    sim = sub.add_parser("simulate", help="one network, one parameter value")
    add_common(sim, with_samples=False)
    sim.add_argument("--scheme", choices=SCHEMES, default=None)
    sim.add_argument("--p", type=float, default=None, help="aloha transmit probability")
    sim.add_argument("--d", type=float, default=None, help="coloring exclusion distance")
    sim.add_argument("--theta", type=float, default=None, help="csma carrier-sense threshold")
    sim.add_argument("--dump-matrices", action="store_true", default=None,
                     help="include full p/t/m matrices in the JSON report")
    sim.add_argument("--dump-transmitters", default=None, metavar="PATH",
                     help="dump per-slot transmitter sets as JSON lines")

    swp = sub.add_parser("sweep", help="sweep one scheme's parameter over a grid")
    add_common(swp, with_samples=True)
    swp.add_argument("--scheme", choices=SCHEMES, default=None)
    swp.add_argument("--p", type=float, default=None, help=argparse.SUPPRESS)
    swp.add_argument("--d", type=float, default=None, help=argparse.SUPPRESS)
    swp.add_argument("--theta", type=float, default=None, help=argparse.SUPPRESS)
    swp.add_argument("--grid", default=None,
                     help="'lo:hi[:points]' (log-spaced for csma) or 'v1,v2,...'")
    swp.add_argument("--csv", default=None, help="write per-grid-point CSV here")

    cmp_ = sub.add_parser("compare", help="sweep all three schemes and compare optima")
    add_common(cmp_, with_samples=True)
    cmp_.add_argument("--p-grid", default=None, help="aloha grid (same syntax as --grid)")
    cmp_.add_argument("--d-grid", default=None, help="coloring grid")
    cmp_.add_argument("--theta-grid", default=None, help="csma grid")
    cmp_.add_argument("--csv", default=None, help="write per-grid-point CSV for all sweeps")

    return parser


def _load_config_file(path: str, command: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a flat JSON object")
    values = {}
    for key, value in raw.items():
        if key == "command":
            # saved provenance configs carry the command; it must agree with argv
            if value != command:
                raise ConfigError(
                    f"config file is for command {value!r}, not {command!r}"
                )
            continue
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        attr, expected = _CONFIG_KEYS[key]
        if expected is float and isinstance(value, (int, float)) and not isinstance(value, bool):
            value = float(value)
        elif expected is int and isinstance(value, int) and not isinstance(value, bool):
            value = int(value)
        elif expected is list and isinstance(value, list):
            value = [float(v) for v in value]
        elif not isinstance(value, expected) or isinstance(value, bool):
            raise ConfigError(f"config key {key!r} must be {expected.__name__}, "
                              f"got {type(value).__name__}")
        values[attr] = value
    return values


def parse_config(argv: list[str] | None = None) -> RunConfig:
    """Parse argv (plus optional --config file) into a validated RunConfig."""
    parser = _build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        raise ConfigError("invalid command line") from None
    if namespace.command is None:
        raise ConfigError("a command is required: simulate | sweep | compare")

    config = RunConfig(command=namespace.command, threads=_default_threads())

    if namespace.config:
        for attr, value in _load_config_file(namespace.config, namespace.command).items():
            setattr(config, attr, value)

    ns = vars(namespace)
    for attr in ("scheme", "p", "d", "theta", "n", "k", "alpha", "fading", "radius",
                 "slots", "samples", "seed", "threads", "out", "verbose",
                 "dump_matrices", "dump_transmitters"):
        if attr in ns and ns[attr] is not None:
            setattr(config, attr, ns[attr])
    if ns.get("csv") is not None:
        config.csv_path = ns["csv"]
    if ns.get("grid") is not None:
        config.grid = _parse_grid_text(ns["grid"], config.scheme or "aloha")
    for flag in ("p_grid", "d_grid", "theta_grid"):
        if ns.get(flag) is not None:
            scheme = {"p_grid": "aloha", "d_grid": "coloring", "theta_grid": "csma"}[flag]
            setattr(config, flag, _parse_grid_text(ns[flag], scheme))

    _validate(config)
    return config


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _validate(config: RunConfig):
    _require(config.n is not None, "missing required field: --n")
    _require(config.n >= 2, f"--n must be >= 2, got {config.n}")
    _require(config.k > 0, f"--k must be positive, got {config.k}")
    _require(config.alpha > 2, f"--alpha must be > 2, got {config.alpha}")
    _require(config.fading in FADING_MODES,
             f"--fading must be one of {FADING_MODES}, got {config.fading!r}")
    _require(config.radius > 0, f"--radius must be positive, got {config.radius}")
    _require(config.slots >= 1, f"--slots must be >= 1, got {config.slots}")
    _require(config.samples >= 1, f"--samples must be >= 1, got {config.samples}")
    _require(config.seed >= 0, f"--seed must be nonnegative, got {config.seed}")
    _require(config.threads >= 1, f"--threads must be >= 1, got {config.threads}")

    if config.command in ("simulate", "sweep"):
        _require(config.scheme is not None, "missing required field: --scheme")
        given = {name: getattr(config, name) for name in ("p", "d", "theta")}
        own = PARAM_NAMES[config.scheme]
        for name, value in given.items():
            if value is not None and name != own:
                raise ConfigError(
                    f"parameter --{name} conflicts with scheme '{config.scheme}' "
                    f"(which is tuned by --{own})"
                )
        if config.command == "simulate":
            _require(given[own] is not None,
                     f"scheme '{config.scheme}' needs its parameter --{own}")
            MacSpec(config.scheme, given[own])  # range check
        else:
            if given[own] is not None:
                raise ConfigError(
                    f"sweep varies --{own} over a grid; pass --grid instead of --{own}"
                )
            if config.grid is None:
                config.grid = _DEFAULT_GRIDS[config.scheme]()
            _require(len(config.grid) > 0, "--grid must be non-empty")
            _require(all(b > a for a, b in zip(config.grid, config.grid[1:])),
                     "--grid values must be strictly increasing")
            for value in config.grid:
                MacSpec(config.scheme, value)

    if config.command == "compare":
        for name, value in (("p", config.p), ("d", config.d), ("theta", config.theta)):
            if value is not None:
                raise ConfigError(f"compare sweeps all schemes; --{name} is not allowed")
        if config.p_grid is None:
            config.p_grid = _DEFAULT_GRIDS["aloha"]()
        if config.d_grid is None:
            config.d_grid = _DEFAULT_GRIDS["coloring"]()
        if config.theta_grid is None:
            config.theta_grid = _DEFAULT_GRIDS["csma"]()
        for scheme, grid in (("aloha", config.p_grid), ("coloring", config.d_grid),
                             ("csma", config.theta_grid)):
            _require(len(grid) > 0, f"{scheme} grid must be non-empty")
            _require(all(b > a for a, b in zip(grid, grid[1:])),
                     f"{scheme} grid values must be strictly increasing")
            for value in grid:
                MacSpec(scheme, value)

    ChannelSpec(fading=config.fading, alpha=config.alpha, k_threshold=config.k)


def resolved_config(config: RunConfig) -> dict:
    """Computation-determining fields only; rerunning from these reproduces outputs."""
    record = {
        "command": config.command,
        "n": config.n,
        "k": config.k,
        "alpha": config.alpha,
        "fading": config.fading,
        "radius": config.radius,
        "slots": config.slots,
        "seed": config.seed,
    }
    if config.command == "simulate":
        record["scheme"] = config.scheme
        record[PARAM_NAMES[config.scheme]] = getattr(config, PARAM_NAMES[config.scheme])
    elif config.command == "sweep":
        record["scheme"] = config.scheme
        record["grid"] = list(config.grid)
        record["samples"] = config.samples
    else:
        record["p_grid"] = list(config.p_grid)
        record["d_grid"] = list(config.d_grid)
        record["theta_grid"] = list(config.theta_grid)
        record["samples"] = config.samples
    return record


def atomic_write_text(path: str, text: str):
    """Write via a temp file in the target directory, then rename over."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".hopcap-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_document(config: RunConfig, payload_key: str, payload: dict) -> str:
    document = {
        "schema_version": SCHEMA_VERSION,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": resolved_config(config),
        payload_key: payload,
    }
    return json.dumps(document, indent=2) + "\n"


def _csv_text(rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(rows)
    return buffer.getvalue()


def _sweep_plan(config: RunConfig, scheme: str, grid: list[float]) -> SweepPlan:
    return SweepPlan(
        scheme=scheme,
        grid=tuple(grid),
        n_nodes=config.n,
        channel=config.channel_spec(),
        samples=config.samples,
        t_slots=config.slots,
        master_seed=config.seed,
        disk_radius=config.radius,
    )


def _execute_simulate(config: RunConfig) -> str:
    net = place_nodes(config.n, config.radius, config.seed)
    mac = MacSpec(config.scheme, getattr(config, PARAM_NAMES[config.scheme]))

    slot_sink = None
    slot_lines: list[str] = []
    if config.dump_transmitters:
        def slot_sink(elected):
            slot_lines.append(json.dumps(
                {"slot": int(elected.slot), "members": [int(i) for i in elected.members]}
            ))

    stats = run_slots(net, config.channel_spec(), mac, config.slots, config.seed,
                      on_slot=slot_sink)
    report = report_from_stats(stats)

    if config.dump_transmitters:
        atomic_write_text(config.dump_transmitters, "\n".join(slot_lines) + "\n")
    if config.out:
        payload = report.to_record(summary=not config.dump_matrices)
        atomic_write_text(config.out, _json_document(config, "report", payload))
    return f"zeta={report.zeta:.6g} connected={str(report.connected).lower()}"


def _execute_sweep(config: RunConfig) -> str:
    plan = _sweep_plan(config, config.scheme, config.grid)
    result = run_sweep(plan, workers=config.threads)
    if config.csv_path:
        atomic_write_text(config.csv_path, _csv_text(result.csv_rows()))
    if config.out:
        atomic_write_text(config.out, _json_document(config, "result", result.to_record()))
    return (f"argmax {plan.param_name}={result.argmax_param:.6g} "
            f"zeta={result.argmax_zeta:.6g}")


def _execute_compare(config: RunConfig) -> str:
    plans = {
        "aloha": _sweep_plan(config, "aloha", config.p_grid),
        "coloring": _sweep_plan(config, "coloring", config.d_grid),
        "csma": _sweep_plan(config, "csma", config.theta_grid),
    }
    comparison = compare_schemes(plans, workers=config.threads)
    if config.csv_path:
        rows = []
        for scheme in ("aloha", "coloring", "csma"):
            rows.extend(comparison.results[scheme].csv_rows())
        atomic_write_text(config.csv_path, _csv_text(rows))
    if config.out:
        atomic_write_text(config.out,
                          _json_document(config, "comparison", comparison.to_record()))
    parts = [f"{scheme}*: {PARAM_NAMES[scheme]}={param:.6g} zeta={zeta:.6g}"
             for scheme, (param, zeta) in comparison.optima.items()]
    return " | ".join(parts)


def execute(config: RunConfig) -> int:
    """Run the configured command; returns the process exit status."""
    logging.basicConfig(
        level=logging.INFO if config.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    runner = {
        "simulate": _execute_simulate,
        "sweep": _execute_sweep,
        "compare": _execute_compare,
    }[config.command]
    summary = runner(config)
    print(summary)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return execute(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - boundary of the process
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
