"""Phonon observables: mean number, coherent fraction, normally ordered variances.

Quadratures follow x = g(a + a+), p = ig(a - a+); the paper's sign of p is
kept as written (only Im rho_{n,n+1} enters var_p, and it enters squared, so
no reported number depends on it).  Variances are in units of g^2; g defaults
to one and is never baked into stored matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import MotionalDensityMatrix

__all__ = [
    "QuadratureVariances",
    "mean_phonons",
    "coherent_fraction",
    "quadrature_variances",
    "variances_from_moments",
]


@dataclass(frozen=True)
class QuadratureVariances:
    """Normally ordered variances plus the coherence numbers they derive from.

    ``gamma`` is None when the state carries no phonons (the ratio is
    undefined there, not zero).
    """

    var_x: float
    var_p: float
    n_mean: float
    coherent_fraction: float
    gamma: float | None
    g: float = 1.0

    @property
    def squeezed_x(self) -> bool:
        return self.var_x < 0.0

    @property
    def squeezed_p(self) -> bool:
        return self.var_p < 0.0


def mean_phonons(rho: MotionalDensityMatrix) -> float:
    """<n> = sum_n n rho_nn over the truncated matrix."""
    d = rho.entries.diagonal().real
    return float(np.arange(d.size) @ d)


def _moment_sums(rho: MotionalDensityMatrix):
    m = rho.entries
    ls = np.arange(m.shape[0])
    s1 = complex((np.sqrt(ls[:-1] + 1.0) * m.diagonal(1)).sum()) if m.shape[0] > 1 else 0j
    s2 = complex((np.sqrt((ls[:-2] + 1.0) * (ls[:-2] + 2.0)) * m.diagonal(2)).sum()) if m.shape[0] > 2 else 0j
    return s1, s2


def coherent_fraction(rho: MotionalDensityMatrix) -> float:
    """|<a>|^2 = |sum_n sqrt(n+1) rho_{n,n+1}|^2."""
    s1, _ = _moment_sums(rho)
    return abs(s1) ** 2


def variances_from_moments(n_mean, s1, s2, g: float = 1.0):
    """(var_x, var_p) from <n> and the coherence sums; accepts arrays.

    var_x = 2g^2 <n> + 2g^2 Re s2 - 4g^2 (Re s1)^2
    var_p = 2g^2 <n> - 2g^2 Re s2 - 4g^2 (Im s1)^2
    """
    g2 = g * g
    s1 = np.asarray(s1)
    s2 = np.asarray(s2)
    var_x = 2.0 * g2 * n_mean + 2.0 * g2 * s2.real - 4.0 * g2 * s1.real**2
    var_p = 2.0 * g2 * n_mean - 2.0 * g2 * s2.real - 4.0 * g2 * s1.imag**2
    return var_x, var_p


def quadrature_variances(rho: MotionalDensityMatrix, g: float = 1.0) -> QuadratureVariances:
    """Normally ordered variances of x and p, with <n>, |<a>|^2 and gamma."""
    n_mean = mean_phonons(rho)
    s1, s2 = _moment_sums(rho)
    var_x, var_p = variances_from_moments(n_mean, s1, s2, g)
    frac = abs(s1) ** 2
    gamma = (frac / n_mean) if n_mean > 0.0 else None
    return QuadratureVariances(
        var_x=float(var_x),
        var_p=float(var_p),
        n_mean=n_mean,
        coherent_fraction=frac,
        gamma=gamma,
        g=g,
    )
