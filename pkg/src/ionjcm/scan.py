"""Deterministic grid-then-refine search for the momentum-squeezing extrema.

The variance landscape oscillates in t at every Rabi frequency sqrt(2n-1)*xi
present in the state, so gradient descent from arbitrary starts is hopeless;
a coarse uniform grid followed by local refinement (each round shrinks every
axis bracket tenfold around the incumbent) is reliable and reproducible.
Ties are broken by evaluation order, which is lexicographic in the axis
definitions, so identical grids give identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .closed_form import case1_series, case2_series, motional_case1, motional_case2
from .core import InvariantError, PhysicalParams
from .observables import quadrature_variances, variances_from_moments
from .states import CaseOneInit, CaseTwoInit

__all__ = [
    "Axis",
    "ScanGrid",
    "ScanResult",
    "ThresholdResult",
    "default_case1_grid",
    "default_case2_grid",
    "scan_case1",
    "scan_case2",
    "threshold_no_squeezing",
]

NEAR_OPTIMUM_TOL = 1e-4  # variance window (units of g^2) for reported co-minimizers
REEVAL_TOL = 1e-12
SAMPLES_PER_PERIOD = 40


@dataclass(frozen=True)
class Axis:
    """Uniform inclusive range; count 1 pins the axis to its start value."""

    name: str
    start: float
    stop: float
    count: int
    periodic: bool = False  # phases refine without clipping to the base range

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"axis {self.name}: count must be >= 1")
        if self.count == 1 and self.start != self.stop:
            raise ValueError(f"axis {self.name}: single-point axis needs start == stop")

    def points(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.start])
        return np.linspace(self.start, self.stop, self.count)

    @property
    def width(self) -> float:
        return self.stop - self.start

    def refined(self, center: float, shrink: float, lo: float, hi: float) -> "Axis":
        if self.count == 1:
            return self
        w = self.width / shrink
        a, b = center - 0.5 * w, center + 0.5 * w
        if not self.periodic:
            a, b = max(a, lo), min(b, hi)
        return Axis(self.name, a, b, self.count, self.periodic)


@dataclass(frozen=True)
class ScanGrid:
    axes: tuple[Axis, ...]
    refine_rounds: int = 3
    shrink: float = 10.0

    def __post_init__(self):
        if not self.axes:
            raise ValueError("empty grid")
        if self.refine_rounds < 0:
            raise ValueError("refine_rounds must be >= 0")

    def axis(self, name: str) -> Axis:
        for ax in self.axes:
            if ax.name == name:
                return ax
        raise KeyError(f"no axis named {name!r}")


@dataclass
class ScanResult:
    optimum_value: float
    location: dict[str, float]
    grid_evaluations: int
    refinement_history: list[tuple[int, float, dict[str, float]]]
    near_optima: list[tuple[float, dict[str, float]]]
    reevaluated_value: float = field(default=math.nan)


def time_axis(t_end: float, xi: float, top_frequency_factor: float, t_start: float = 0.0) -> Axis:
    """t axis sampling the fastest Rabi period at least SAMPLES_PER_PERIOD times.

    ``top_frequency_factor`` is the largest sqrt(2n-1)-type multiplier of xi
    in the scanned family.
    """
    period = 2.0 * math.pi / (top_frequency_factor * xi)
    count = int(math.ceil((t_end - t_start) / (period / SAMPLES_PER_PERIOD))) + 1
    first = t_start if t_start > 0.0 else (t_end - t_start) / count * 0.5
    return Axis("t", first, t_end, count)


def default_case1_grid(params: PhysicalParams, n0_max: float = 2.5, t_end: float = 500e-6,
                       refine_rounds: int = 3) -> ScanGrid:
    top = math.sqrt(2.0 * params.fock_cutoff - 1.0)
    return ScanGrid(
        axes=(
            Axis("n0_mean", 0.1, n0_max, 25),
            Axis("phi", 0.0, 2.0 * math.pi * 11.0 / 12.0, 12, periodic=True),
            time_axis(t_end, params.xi, top),
        ),
        refine_rounds=refine_rounds,
    )


def default_case2_grid(params: PhysicalParams, t_end: float = 600e-6,
                       refine_rounds: int = 3) -> ScanGrid:
    return ScanGrid(
        axes=(
            Axis("theta", 0.0, 0.5 * math.pi, 25),
            Axis("psi", 0.0, 0.5 * math.pi, 13),
            Axis("phi1", 0.0, 1.5 * math.pi, 4, periodic=True),
            Axis("phi2", 0.0, 2.0 * math.pi * 11.0 / 12.0, 12, periodic=True),
            time_axis(t_end, params.xi, math.sqrt(3.0)),
        ),
        refine_rounds=refine_rounds,
    )


def _run_scan(grid: ScanGrid, slice_names: list[str], evaluate_slice, params: PhysicalParams,
              bounds: dict[str, tuple[float, float]]):
    """Shared grid-then-refine driver.

    ``evaluate_slice`` maps a dict of slice-axis values plus a t array to the
    var_p array over t.  Returns (best value, best raw location, evaluation
    count, history, near candidates).
    """
    axes = {ax.name: ax for ax in grid.axes}
    t_ax = axes["t"]
    slice_axes = [axes[name] for name in slice_names]

    best = math.inf
    best_loc: dict[str, float] = {}
    evaluations = 0
    history: list[tuple[int, float, dict[str, float]]] = []
    near: list[tuple[float, dict[str, float]]] = []

    for rnd in range(grid.refine_rounds + 1):
        ts = t_ax.points()
        grids = [ax.points() for ax in slice_axes]
        index = np.zeros(len(slice_axes), dtype=int)
        done = False
        while not done:
            values = {ax.name: float(g[i]) for ax, g, i in zip(slice_axes, grids, index)}
            vp = evaluate_slice(values, ts)
            evaluations += vp.size
            j = int(vp.argmin())
            if vp[j] < best:
                best = float(vp[j])
                best_loc = dict(values, t=float(ts[j]))
            # report distinct minimizers only: inside the tolerance band, keep
            # local minima of the t landscape, not every sample of a flat basin
            band = np.flatnonzero(vp <= best + NEAR_OPTIMUM_TOL)
            for k in band:
                left_ok = k == 0 or vp[k] < vp[k - 1]
                right_ok = k == vp.size - 1 or vp[k] <= vp[k + 1]
                if left_ok and right_ok:
                    near.append((float(vp[k]), dict(values, t=float(ts[k]))))
            if len(near) > 8000:
                near.sort(key=lambda it: it[0])
                del near[2000:]
            # lexicographic odometer over the slice axes
            for pos in range(len(index) - 1, -1, -1):
                index[pos] += 1
                if index[pos] < len(grids[pos]):
                    break
                index[pos] = 0
            else:
                done = True
        history.append((rnd, best, dict(best_loc)))
        if rnd == grid.refine_rounds:
            break
        slice_axes = [
            ax.refined(best_loc[ax.name], grid.shrink, *bounds.get(ax.name, (ax.start, ax.stop)))
            for ax in slice_axes
        ]
        t_ax = t_ax.refined(best_loc["t"], grid.shrink, *bounds.get("t", (t_ax.start, t_ax.stop)))

    near = sorted(
        ((v, loc) for v, loc in near if v <= best + NEAR_OPTIMUM_TOL),
        key=lambda it: it[0],
    )[:500]
    return best, best_loc, evaluations, history, near


def scan_case1(grid: ScanGrid, params: PhysicalParams) -> ScanResult:
    """Global minimum of var_p over (initial mean, coherent phase, time)."""

    def eval_slice(values, ts):
        init = CaseOneInit(r=math.sqrt(max(values["n0_mean"], 0.0)), phi=values["phi"])
        series = case1_series(init, ts, params)
        _, var_p = variances_from_moments(series.n_mean, series.s1, series.s2, 1.0)
        return var_p

    bounds = {
        "n0_mean": (grid.axis("n0_mean").points().min(), grid.axis("n0_mean").stop),
        "t": (0.0, grid.axis("t").stop),
    }
    best, loc, evals, history, near = _run_scan(grid, ["n0_mean", "phi"], eval_slice, params, bounds)

    init = CaseOneInit(r=math.sqrt(loc["n0_mean"]), phi=loc["phi"])
    check = quadrature_variances(motional_case1(init, loc["t"], params), 1.0).var_p
    if abs(check - best) > REEVAL_TOL:
        raise InvariantError("scan", f"re-evaluation {check!r} != scanned optimum {best!r}")
    return ScanResult(best, loc, evals, history, near, reevaluated_value=check)


def _sphere(values) -> tuple[float, float, float]:
    theta, psi = values["theta"], values["psi"]
    return (
        math.sin(theta) * math.cos(psi),
        math.sin(theta) * math.sin(psi),
        math.cos(theta),
    )


def scan_case2(grid: ScanGrid, params: PhysicalParams) -> ScanResult:
    """Global minimum of var_p over the superposition sphere, phases and time."""

    def eval_slice(values, ts):
        a, b, c = _sphere(values)
        init = CaseTwoInit(a=a, b=b, c=c, phi1=values["phi1"], phi2=values["phi2"])
        series = case2_series(init, ts, params)
        _, var_p = variances_from_moments(series.n_mean, series.s1, series.s2, 1.0)
        return var_p

    bounds = {
        "theta": (0.0, 0.5 * math.pi),
        "psi": (0.0, 0.5 * math.pi),
        "t": (0.0, grid.axis("t").stop),
    }
    best, loc, evals, history, near = _run_scan(
        grid, ["theta", "psi", "phi1", "phi2"], eval_slice, params, bounds
    )

    def with_amplitudes(raw: dict[str, float]) -> dict[str, float]:
        a, b, c = _sphere(raw)
        return {
            "a": a, "b": b, "c": c,
            "phi1": raw["phi1"], "phi2": raw["phi2"], "t": raw["t"],
            "theta": raw["theta"], "psi": raw["psi"],
        }

    location = with_amplitudes(loc)
    init = CaseTwoInit(a=location["a"], b=location["b"], c=location["c"],
                       phi1=location["phi1"], phi2=location["phi2"])
    check = quadrature_variances(motional_case2(init, location["t"], params), 1.0).var_p
    if abs(check - best) > REEVAL_TOL:
        raise InvariantError("scan", f"re-evaluation {check!r} != scanned optimum {best!r}")
    history = [(rnd, v, with_amplitudes(l)) for rnd, v, l in history]
    near = [(v, with_amplitudes(l)) for v, l in near]
    return ScanResult(best, location, evals, history, near, reevaluated_value=check)


@dataclass(frozen=True)
class ThresholdResult:
    """Smallest initial mean with no momentum squeezing left, plus its bracket."""

    threshold: float
    bracket: tuple[float, float]
    squeezing_at_lo: float
    squeezing_at_hi: float
    evaluations: int


def threshold_no_squeezing(params: PhysicalParams, phi: float = 0.0,
                           n0_lo: float = 0.05, n0_hi: float = 2.5,
                           resolution: float = 0.01, t_end: float = 600e-6) -> ThresholdResult:
    """Bisect the initial mean for the onset of "no squeezing at any time".

    F(n0) = min over the t grid of var_p(n0, phi, t); squeezing exists while
    F < 0.  Bisection assumes one sign change inside the bracket, which holds
    for this family (F is negative at small means and flat-zero above the
    crossing).  Returns the smallest probed mean with F >= 0 as the
    threshold, with the final bracket.
    """
    top = math.sqrt(2.0 * params.fock_cutoff - 1.0)
    ts = time_axis(t_end, params.xi, top).points()

    evaluations = 0

    def f(n0: float) -> float:
        nonlocal evaluations
        init = CaseOneInit(r=math.sqrt(n0), phi=phi)
        series = case1_series(init, ts, params)
        _, var_p = variances_from_moments(series.n_mean, series.s1, series.s2, 1.0)
        evaluations += var_p.size
        return float(var_p.min())

    f_lo, f_hi = f(n0_lo), f(n0_hi)
    if not (f_lo < 0.0 <= f_hi):
        raise ValueError(
            f"bracket does not straddle the squeezing boundary: "
            f"F({n0_lo}) = {f_lo:.3e}, F({n0_hi}) = {f_hi:.3e}"
        )
    lo, hi = n0_lo, n0_hi
    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm < 0.0:
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    return ThresholdResult(
        threshold=hi, bracket=(lo, hi),
        squeezing_at_lo=f_lo, squeezing_at_hi=f_hi,
        evaluations=evaluations,
    )
