"""Run configurations and the execution engine behind the CLI and the service.

A run is described by a flat key = value configuration (strictly validated:
unknown keys and keys that do not belong to the requested mode are errors).
Figure modes encode the published parameter sets so each reproduction is a
single command; custom modes take explicit initial conditions or scan
settings; verify-oracle runs the closed-form-vs-brute-force battery.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, fields
from typing import Any

import numpy as np

from . import __version__
from .closed_form import MomentSeries, case1_series, case2_series, distribution_series
from .core import PhysicalParams, default_cutoff
from .observables import variances_from_moments
from .scan import ScanResult, default_case1_grid, default_case2_grid, scan_case1, scan_case2
from .states import (
    DISTRIBUTION_KINDS,
    CaseOneInit,
    CaseTwoInit,
    distribution_cutoff,
    phonon_distribution,
)
from .verify import ORACLE_TOL, verify_oracle

__all__ = [
    "ConfigError",
    "RunConfig",
    "RunResult",
    "MODES",
    "parse_config",
    "serialize_config",
    "build_config",
    "execute",
]

MODES = (
    "figure1", "figure2", "figure3", "figure4", "figure5", "figure6",
    "figure7", "figure8", "custom-evolve", "custom-scan", "verify-oracle",
)

FIGURE8_C = 0.96  # published case-2 operating point: c = 0.96, b = 0


class ConfigError(ValueError):
    """Invalid run configuration; the message names the offending key."""


# key -> (type, description)
KEY_TYPES: dict[str, type] = {
    "mode": str,
    "eta": float,
    "omega_hz": float,
    "g": float,
    "cutoff": int,
    "t_start_us": float,
    "t_end_us": float,
    "samples": int,
    "out": str,
    "format": str,
    "n0_mean": float,
    "phi": float,
    "a": float,
    "b": float,
    "c": float,
    "phi1": float,
    "phi2": float,
    "dist_kind": str,
    "dist_mean": float,
    "family": str,
    "refine_rounds": int,
    "n0_max": float,
    "seed": int,
    "trials": int,
}

_COMMON = ("mode", "eta", "omega_hz", "g", "cutoff", "out", "format")
_TIMED = _COMMON + ("t_start_us", "t_end_us", "samples")

# keys each mode accepts beyond nothing; first tuple entry set is allowed,
# second is required-on-top-of-defaults
MODE_KEYS: dict[str, tuple[tuple[str, ...], tuple[str, ...]]] = {
    **{m: (_TIMED, ()) for m in ("figure1", "figure2", "figure3", "figure4",
                                  "figure5", "figure6", "figure7", "figure8")},
    "custom-evolve": (
        _TIMED + ("n0_mean", "phi", "a", "b", "c", "phi1", "phi2", "dist_kind", "dist_mean"),
        (),
    ),
    "custom-scan": (_TIMED + ("family", "refine_rounds", "n0_max"), ("family",)),
    "verify-oracle": (_COMMON + ("seed", "trials"), ()),
}


@dataclass(frozen=True)
class RunConfig:
    mode: str
    eta: float = 0.1
    omega_hz: float = 5e5
    g: float = 1.0
    cutoff: int | None = None
    t_start_us: float = 0.0
    t_end_us: float = 600.0
    samples: int = 4000
    out: str | None = None
    format: str = "csv"
    n0_mean: float | None = None
    phi: float | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None
    phi1: float | None = None
    phi2: float | None = None
    dist_kind: str | None = None
    dist_mean: float | None = None
    family: str | None = None
    refine_rounds: int = 3
    n0_max: float = 2.5
    seed: int = 20260810
    trials: int = 200

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode: unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format: expected csv or json, got {self.format!r}")
        if not (self.eta > 0):
            raise ConfigError(f"eta: must be > 0, got {self.eta}")
        if not (self.omega_hz > 0):
            raise ConfigError(f"omega_hz: must be > 0, got {self.omega_hz}")
        if not (self.g > 0):
            raise ConfigError(f"g: must be > 0, got {self.g}")
        if self.cutoff is not None and self.cutoff < 2:
            raise ConfigError(f"cutoff: must be >= 2, got {self.cutoff}")
        if not (self.t_end_us > self.t_start_us >= 0.0):
            raise ConfigError(
                f"t_end_us: need t_end_us > t_start_us >= 0, got "
                f"({self.t_start_us}, {self.t_end_us})"
            )
        if self.samples < 2:
            raise ConfigError(f"samples: must be >= 2, got {self.samples}")
        if self.refine_rounds < 0:
            raise ConfigError(f"refine_rounds: must be >= 0, got {self.refine_rounds}")
        if self.mode == "custom-scan" and self.family not in ("case1", "case2"):
            raise ConfigError(f"family: expected case1 or case2, got {self.family!r}")
        if self.mode == "custom-evolve":
            self._check_init()
        if self.trials < 1:
            raise ConfigError(f"trials: must be >= 1, got {self.trials}")

    def _check_init(self):
        kinds = []
        if self.n0_mean is not None:
            kinds.append("coherent")
        if any(v is not None for v in (self.a, self.b, self.c)):
            kinds.append("superposition")
        if self.dist_kind is not None:
            kinds.append("distribution")
        if len(kinds) != 1:
            raise ConfigError(
                "custom-evolve needs exactly one initial condition: "
                "n0_mean [phi] | a b c [phi1 phi2] | dist_kind dist_mean"
            )
        if kinds[0] == "superposition" and None in (self.a, self.b, self.c):
            raise ConfigError("a, b, c must all be given for a superposition initial state")
        if kinds[0] == "distribution":
            if self.dist_kind not in DISTRIBUTION_KINDS:
                raise ConfigError(
                    f"dist_kind: expected one of {', '.join(DISTRIBUTION_KINDS)}, got {self.dist_kind!r}"
                )
            if self.dist_mean is None:
                raise ConfigError("dist_mean is required with dist_kind")

    @property
    def params(self) -> PhysicalParams:
        return PhysicalParams(
            eta=self.eta,
            omega_rabi=2.0 * math.pi * self.omega_hz,
            g=self.g,
            fock_cutoff=self.cutoff if self.cutoff is not None else self._default_cutoff(),
        )

    def _default_cutoff(self) -> int:
        if self.mode in ("figure1", "figure4", "figure5"):
            return default_cutoff(8.0)
        if self.mode == "figure6":
            return default_cutoff(self.n0_max)
        if self.mode == "figure7":
            return default_cutoff(0.51)
        if self.mode in ("figure2", "figure8"):
            return 4
        if self.mode == "figure3":
            return max(distribution_cutoff(k, 3.0) for k in ("number", "thermal", "squeezed_vacuum"))
        if self.mode == "custom-scan":
            return default_cutoff(self.n0_max) if self.family == "case1" else 4
        if self.mode == "verify-oracle":
            return 30
        # custom-evolve
        if self.n0_mean is not None:
            return default_cutoff(self.n0_mean)
        if self.dist_kind is not None:
            return distribution_cutoff(self.dist_kind, self.dist_mean)
        return 4

    def times(self) -> np.ndarray:
        return np.linspace(self.t_start_us, self.t_end_us, self.samples) * 1e-6

    def output_path(self) -> str:
        return self.out if self.out is not None else f"{self.mode}.{self.format}"


def parse_config(text: str) -> RunConfig:
    """Parse the documented key = value format into a validated RunConfig."""
    return build_config(_parse_mapping(text))


def _parse_mapping(text: str) -> dict[str, Any]:
    raw: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = _coerce(key, value, lineno)
    return raw


def _coerce(key: str, value: str, lineno: int | None = None) -> Any:
    where = f"line {lineno}: " if lineno is not None else ""
    if key not in KEY_TYPES:
        raise ConfigError(f"{where}unknown key {key!r}")
    typ = KEY_TYPES[key]
    if typ is str:
        return value
    try:
        if typ is int:
            as_float = float(value)
            as_int = int(as_float)
            if as_int != as_float:
                raise ValueError
            return as_int
        return float(value)
    except ValueError:
        raise ConfigError(
            f"{where}key {key!r} expects {'an integer' if typ is int else 'a number'}, got {value!r}"
        ) from None


def build_config(mapping: dict[str, Any], overrides: dict[str, Any] | None = None) -> RunConfig:
    """RunConfig from a parsed mapping, with optional flag overrides on top."""
    merged = dict(mapping)
    if overrides:
        for key, val in overrides.items():
            if val is not None:
                merged[key] = val
    if "mode" not in merged:
        raise ConfigError("missing required key 'mode'")
    mode = merged["mode"]
    if mode not in MODE_KEYS:
        raise ConfigError(f"mode: unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    allowed, required = MODE_KEYS[mode]
    for key in merged:
        if key not in KEY_TYPES:
            raise ConfigError(f"unknown key {key!r}")
        if key not in allowed:
            raise ConfigError(f"key {key!r} is not accepted in mode {mode!r}")
    for key in required:
        if key not in merged:
            raise ConfigError(f"mode {mode!r} requires key {key!r}")
    return RunConfig(**merged)


def serialize_config(config: RunConfig) -> str:
    """Canonical key = value text; parse_config round-trips it exactly."""
    lines = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if value is None:
            continue
        allowed, _ = MODE_KEYS[config.mode]
        if f.name != "mode" and f.name not in allowed:
            continue
        if isinstance(value, float):
            lines.append(f"{f.name} = {value!r}")
        else:
            lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


@dataclass
class RunResult:
    mode: str
    columns: list[str]
    rows: Any  # sequence of rows; cells are float (NaN marks absent) or str
    manifest: dict[str, Any]
    scan: ScanResult | None = None


def _series_variances(series: MomentSeries, g: float):
    var_x, var_p = variances_from_moments(series.n_mean, series.s1, series.s2, g)
    g2 = g * g
    return var_x / g2, var_p / g2


def _figure_series(config: RunConfig):
    """(columns, rows, deficit) for the preset figure modes."""
    params = config.params
    ts = config.times()
    t_us = ts * 1e6
    mode = config.mode

    if mode in ("figure1", "figure4"):
        series = case1_series(CaseOneInit(r=math.sqrt(8.0), phi=0.0), ts, params)
        if mode == "figure1":
            cols = ["t_us", "rho_11", "rho_00", "rho_m1m1"]
            rows = np.column_stack([t_us, series.occ_up, series.occ_mid, series.occ_down])
        else:
            cols = ["t_us", "n_mean"]
            rows = np.column_stack([t_us, series.n_mean])
        return cols, rows, series.deficit

    if mode == "figure2":
        amp = 1.0 / math.sqrt(3.0)
        series = case2_series(CaseTwoInit(a=amp, b=amp, c=amp), ts, params)
        return ["t_us", "rho_m1m1"], np.column_stack([t_us, series.occ_down]), 0.0

    if mode == "figure3":
        cols = ["t_us"]
        data = [t_us]
        deficit = 0.0
        for kind, label in (("number", "number"), ("thermal", "thermal"),
                            ("squeezed_vacuum", "squeezed")):
            dist = phonon_distribution(kind, 3.0, distribution_cutoff(kind, 3.0))
            series = distribution_series(dist, ts, params)
            cols.append(f"rho_11_{label}")
            data.append(series.occ_up)
            deficit = max(deficit, series.deficit)
        return cols, np.column_stack(data), deficit

    if mode == "figure5":
        cols = ["t_us", "n0_mean", "gamma"]
        blocks = []
        deficit = 0.0
        for n0 in np.linspace(0.5, 8.0, 16):
            series = case1_series(CaseOneInit(r=math.sqrt(n0), phi=0.0), ts, params)
            deficit = max(deficit, series.deficit)
            blocks.append(np.column_stack([t_us, np.full_like(t_us, n0), series.gamma()]))
        return cols, np.vstack(blocks), deficit

    if mode == "figure6":
        cols = ["t_us", "n0_mean", "var_p_over_g2"]
        blocks = []
        deficit = 0.0
        for n0 in np.linspace(0.1, config.n0_max, round(config.n0_max / 0.1)):
            series = case1_series(CaseOneInit(r=math.sqrt(n0), phi=0.0), ts, params)
            deficit = max(deficit, series.deficit)
            _, var_p = _series_variances(series, params.g)
            blocks.append(np.column_stack([t_us, np.full_like(t_us, n0), var_p]))
        return cols, np.vstack(blocks), deficit

    if mode == "figure7":
        series = case1_series(CaseOneInit(r=math.sqrt(0.51), phi=0.0), ts, params)
        var_x, var_p = _series_variances(series, params.g)
        cols = ["t_us", "var_x_over_g2", "var_p_over_g2"]
        return cols, np.column_stack([t_us, var_x, var_p]), series.deficit

    if mode == "figure8":
        c = FIGURE8_C
        init = CaseTwoInit(a=math.sqrt(1.0 - c * c), b=0.0, c=c, phi1=0.0, phi2=0.0)
        series = case2_series(init, ts, params)
        var_x, var_p = _series_variances(series, params.g)
        cols = ["t_us", "var_x_over_g2", "var_p_over_g2"]
        return cols, np.column_stack([t_us, var_x, var_p]), 0.0

    raise ConfigError(f"mode {mode!r} is not a figure preset")


def _custom_evolve(config: RunConfig):
    params = config.params
    ts = config.times()
    if config.n0_mean is not None:
        init = CaseOneInit(r=math.sqrt(config.n0_mean), phi=config.phi or 0.0)
        series = case1_series(init, ts, params)
    elif config.dist_kind is not None:
        dist = phonon_distribution(config.dist_kind, config.dist_mean, params.fock_cutoff)
        series = distribution_series(dist, ts, params)
    else:
        init = CaseTwoInit(a=config.a, b=config.b, c=config.c,
                           phi1=config.phi1 or 0.0, phi2=config.phi2 or 0.0)
        series = case2_series(init, ts, params)
    var_x, var_p = _series_variances(series, params.g)
    cols = ["t_us", "rho_11", "rho_00", "rho_m1m1", "n_mean", "coherent_fraction",
            "gamma", "var_x_over_g2", "var_p_over_g2"]
    rows = np.column_stack([
        ts * 1e6, series.occ_up, series.occ_mid, series.occ_down,
        series.n_mean, np.abs(series.s1) ** 2, series.gamma(), var_x, var_p,
    ])
    return cols, rows, series.deficit


def _scan_rows(result: ScanResult, family: str):
    if family == "case1":
        cols = ["var_p_over_g2", "n0_mean", "phi", "t_us"]
        keys = ("n0_mean", "phi")
    else:
        cols = ["var_p_over_g2", "a", "b", "c", "phi1", "phi2", "t_us"]
        keys = ("a", "b", "c", "phi1", "phi2")
    entries = [(result.optimum_value, result.location)] + [
        it for it in result.near_optima if it[1] != result.location
    ]
    rows = np.array([
        [value] + [loc[k] for k in keys] + [loc["t"] * 1e6] for value, loc in entries
    ])
    return cols, rows


def _scan_manifest(result: ScanResult) -> dict[str, Any]:
    return {
        "optimum_value": result.optimum_value,
        "location": {k: v for k, v in result.location.items()},
        "grid_evaluations": result.grid_evaluations,
        "reevaluated_value": result.reevaluated_value,
        "refinement_history": [
            {"round": rnd, "value": val, "location": loc}
            for rnd, val, loc in result.refinement_history
        ],
        "near_optima_count": len(result.near_optima),
    }


def execute(config: RunConfig) -> RunResult:
    """Run one configuration; raises ConfigError / InvariantError on failure."""
    started = time.perf_counter()
    scan_result = None
    checks = None

    if config.mode.startswith("figure"):
        cols, rows, deficit = _figure_series(config)
    elif config.mode == "custom-evolve":
        cols, rows, deficit = _custom_evolve(config)
    elif config.mode == "custom-scan":
        params = config.params
        t_end = config.t_end_us * 1e-6
        if config.family == "case1":
            grid = default_case1_grid(params, n0_max=config.n0_max, t_end=t_end,
                                      refine_rounds=config.refine_rounds)
            scan_result = scan_case1(grid, params)
        else:
            grid = default_case2_grid(params, t_end=t_end, refine_rounds=config.refine_rounds)
            scan_result = scan_case2(grid, params)
        cols, rows = _scan_rows(scan_result, config.family)
        deficit = 0.0
    elif config.mode == "verify-oracle":
        report = verify_oracle(config.params, seed=config.seed, trials=config.trials)
        cols = ["check", "max_abs_deviation", "samples"]
        names = sorted(report.deviations)
        rows = [[k, report.deviations[k], report.samples[k]] for k in names]
        checks = {
            "tolerance": report.tolerance,
            "max_deviation": report.max_deviation,
            "passed": report.passed,
            "per_check": {k: report.deviations[k] for k in names},
            "seed": report.seed,
        }
        deficit = 0.0
        if not report.passed:
            from .core import InvariantError

            raise InvariantError(
                "closed-form",
                f"closed forms deviate from the oracle by {report.max_deviation:.3e} "
                f"(tolerance {report.tolerance:.1e})",
            )
    else:  # pragma: no cover - guarded by RunConfig validation
        raise ConfigError(f"mode {config.mode!r} not implemented")

    manifest = {
        "artifact": {"name": "ionjcm", "version": __version__},
        "config": {k: v for k, v in _config_mapping(config).items()},
        "mode": config.mode,
        "cutoff": config.params.fock_cutoff,
        "truncation_deficit": deficit,
        "columns": cols,
        "rows": len(rows),
        "wall_time_s": time.perf_counter() - started,
    }
    if checks is not None:
        manifest["checks"] = checks
    if scan_result is not None:
        manifest["scan"] = _scan_manifest(scan_result)
    return RunResult(mode=config.mode, columns=cols, rows=rows, manifest=manifest,
                     scan=scan_result)


def _config_mapping(config: RunConfig) -> dict[str, Any]:
    allowed, _ = MODE_KEYS[config.mode]
    out = {}
    for f in fields(RunConfig):
        if f.name != "mode" and f.name not in allowed:
            continue
        value = getattr(config, f.name)
        if value is not None:
            out[f.name] = value
    return out
