"""Initial conditions: coherent/diagonal phonon distributions and internal superpositions."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PhononDistribution",
    "CaseOneInit",
    "CaseTwoInit",
    "coherent_amplitudes",
    "phonon_distribution",
    "case_one_state",
    "case_two_state",
    "distribution_cutoff",
    "DISTRIBUTION_KINDS",
]

DISTRIBUTION_KINDS = ("poisson", "number", "thermal", "squeezed_vacuum")

NORM_TOL = 1e-9


def wrap_phase(phi: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    w = math.remainder(phi, 2.0 * math.pi)
    if w <= -math.pi:
        w += 2.0 * math.pi
    return w


def coherent_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """Number-basis amplitudes q(m) = exp(-|a|^2/2) a^m / sqrt(m!).

    Computed by the stable recurrence q(m) = q(m-1) * alpha / sqrt(m); no
    factorials are ever formed, so any cutoff is safe.
    """
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    q = np.zeros(cutoff + 1, dtype=complex)
    q[0] = math.exp(-0.5 * abs(alpha) ** 2)
    for m in range(1, cutoff + 1):
        q[m] = q[m - 1] * alpha / math.sqrt(m)
    return q


@dataclass(frozen=True)
class PhononDistribution:
    """Diagonal phonon-number distribution p(n), n = 0..cutoff."""

    weights: np.ndarray
    kind: str
    mean_target: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d array")
        if w.min() < 0.0:
            raise ValueError(f"negative weight {w.min():.3e}")
        if w.sum() > 1.0 + 1e-12:
            raise ValueError(f"weights sum to {w.sum():.15f} > 1")

    @property
    def cutoff(self) -> int:
        return self.weights.size - 1

    @property
    def deficit(self) -> float:
        """Truncation deficit 1 - sum p(n), carried explicitly."""
        return max(0.0, 1.0 - float(self.weights.sum()))

    def mean(self) -> float:
        return float(np.arange(self.weights.size) @ self.weights)


def distribution_cutoff(kind: str, mean: float) -> int:
    """Cutoff leaving tail mass below ~1e-12 for the given distribution kind.

    Coherent/Poisson uses the model-core policy; thermal and squeezed-vacuum
    tails are geometric with ratio mean/(1+mean) resp. tanh^2 r, so their
    cutoffs are solved from that ratio instead.
    """
    from .core import default_cutoff

    if kind in ("poisson", "number"):
        return max(default_cutoff(mean), math.ceil(mean) + 2)
    if kind == "thermal":
        if mean == 0:
            return 2
        ratio = mean / (1.0 + mean)
    elif kind == "squeezed_vacuum":
        if mean == 0:
            return 2
        ratio = mean / (1.0 + mean)  # tanh^2 r with sinh^2 r = mean
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    n = math.ceil(math.log(1e-12 * (1.0 - ratio)) / math.log(ratio))
    if kind == "squeezed_vacuum":
        n = 2 * n + 2
    return max(2, n)


def phonon_distribution(kind: str, mean: float, cutoff: int) -> PhononDistribution:
    """Build p(n) for kind in {poisson, number, thermal, squeezed_vacuum}.

    poisson: p(n) = e^{-mu} mu^n / n!;  number: delta at n = mean;
    thermal: p(n) = mu^n / (1+mu)^{n+1};
    squeezed_vacuum: p(2k) = ((2k)! / (2^k k!)^2) tanh^{2k} r / cosh r with
    sinh^2 r = mean and p(odd) = 0.  All weights use multiplicative
    recurrences.
    """
    if mean < 0:
        raise ValueError("mean must be >= 0")
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    p = np.zeros(cutoff + 1)

    if kind == "poisson":
        p[0] = math.exp(-mean)
        for n in range(1, cutoff + 1):
            p[n] = p[n - 1] * mean / n
    elif kind == "number":
        n = int(round(mean))
        if abs(mean - n) > 1e-12:
            raise ValueError(f"number state requires an integer mean, got {mean}")
        if n > cutoff:
            raise ValueError(f"number state n={n} exceeds cutoff {cutoff}")
        p[n] = 1.0
    elif kind == "thermal":
        p[0] = 1.0 / (1.0 + mean)
        ratio = mean / (1.0 + mean)
        for n in range(1, cutoff + 1):
            p[n] = p[n - 1] * ratio
    elif kind == "squeezed_vacuum":
        # sinh^2 r = mean; tanh^2 r = mean/(1+mean); cosh r = sqrt(1+mean)
        tanh2 = mean / (1.0 + mean)
        p[0] = 1.0 / math.sqrt(1.0 + mean)
        # p(2k)/p(2k-2) = tanh^2 r * (2k-1)/(2k)
        for k in range(1, cutoff // 2 + 1):
            p[2 * k] = p[2 * k - 2] * tanh2 * (2 * k - 1) / (2 * k)
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    return PhononDistribution(weights=p, kind=kind, mean_target=float(mean))


@dataclass(frozen=True)
class CaseOneInit:
    """Both ions ground, COM mode in a coherent state alpha = r e^{i phi}."""

    r: float
    phi: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("coherent magnitude r must be >= 0")
        object.__setattr__(self, "phi", wrap_phase(self.phi))

    @property
    def alpha(self) -> complex:
        return self.r * complex(math.cos(self.phi), math.sin(self.phi))

    @property
    def mean_phonons(self) -> float:
        return self.r * self.r

    def amplitudes(self, cutoff: int) -> np.ndarray:
        return coherent_amplitudes(self.alpha, cutoff)

    def distribution(self, cutoff: int) -> PhononDistribution:
        return phonon_distribution("poisson", self.mean_phonons, cutoff)


def case_one_state(alpha: complex) -> CaseOneInit:
    """CaseOneInit from a complex coherent amplitude."""
    a = complex(alpha)
    return CaseOneInit(r=abs(a), phi=math.atan2(a.imag, a.real))


@dataclass(frozen=True)
class CaseTwoInit:
    """Internal superposition a|+1> + b e^{i phi1}|0> + c e^{i phi2}|-1>, COM in vacuum."""

    a: float
    b: float
    c: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        if min(self.a, self.b, self.c) < 0:
            raise ValueError("amplitudes a, b, c must be >= 0 (phases are separate)")
        norm = self.a**2 + self.b**2 + self.c**2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(
                f"a^2+b^2+c^2 = {norm:.12f} violates normalization beyond {NORM_TOL}"
            )
        object.__setattr__(self, "phi1", wrap_phase(self.phi1))
        object.__setattr__(self, "phi2", wrap_phase(self.phi2))


def case_two_state(a: float, b: float, c: float, phi1: float = 0.0, phi2: float = 0.0) -> CaseTwoInit:
    """Validated CaseTwoInit; normalization violations are rejected, never fixed."""
    return CaseTwoInit(a=a, b=b, c=c, phi1=phi1, phi2=phi2)
