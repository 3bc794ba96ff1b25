"""Analytic time evolution for both initial-condition families.

Everything here is built from the column of the subspace propagator that the
initial states touch.  For an initial |-1, n> (ground ions, n phonons) the
amplitudes after time t are

    f_up(n)   = sqrt(n(n-1))/(2n-1) * (1 - cos b_n)    on |+1, n-2>
    f_mid(n)  = -sqrt(n/(2n-1)) * sin b_n              on |0,  n-1>
    f_down(n) = (n cos b_n + n - 1)/(2n-1)             on |-1, n>

with b_n = sqrt(2n-1) * xi * t.  The n = 0 and n = 1 degeneracies are taken
as limits: f_down(0) = 1 (the bracket coefficient (n-1)/(2n-1) -> 1 with the
cosine carrying factor n = 0), f_mid(0) = 0, f_up(0) = f_up(1) = 0; no
negative radicand is ever evaluated.  f_up^2 + f_mid^2 + f_down^2 = 1 for
every n, so occupations inherit the initial distribution's normalization.

Sums over the initial distribution are truncated at the Fock cutoff, exactly
matching the truncated initial state the brute-force evolver propagates; the
dropped tail is carried as an explicit deficit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import InternalOccupations, MotionalDensityMatrix, PhysicalParams
from .states import CaseOneInit, CaseTwoInit, PhononDistribution

__all__ = [
    "EvolutionPoint",
    "occupations_case1",
    "occupations_case2",
    "motional_case1",
    "motional_case2",
    "limit_coherent_form",
    "limit_squeezed_form",
    "case1_series",
    "case2_series",
    "evaluate_case1",
    "evaluate_case2",
]


def branch_factors(n_values: np.ndarray, xi_t: np.ndarray):
    """(f_up, f_mid, f_down) on the grid n_values x xi_t, limits included."""
    n = np.asarray(n_values, dtype=float)[:, None]
    xt = np.atleast_1d(np.asarray(xi_t, dtype=float))[None, :]
    beta = np.sqrt(np.maximum(2.0 * n - 1.0, 0.0)) * xt
    denom = np.where(n >= 1, 2.0 * n - 1.0, 1.0)
    cosb, sinb = np.cos(beta), np.sin(beta)
    f_up = np.where(n >= 2, np.sqrt(np.maximum(n * (n - 1.0), 0.0)) / denom * (1.0 - cosb), 0.0)
    f_mid = np.where(n >= 1, -np.sqrt(np.maximum(n, 0.0) / denom) * sinb, 0.0)
    f_down = np.where(n >= 1, (n * cosb + n - 1.0) / denom, 1.0)
    return f_up, f_mid, f_down


def occupations_case1(dist: PhononDistribution, t: float, params: PhysicalParams) -> InternalOccupations:
    """Internal occupations for ground ions and any diagonal phonon distribution.

    rho_11 = sum n(n-1)/(2n-1)^2 (1-cos b_n)^2 p(n),
    rho_00 = sum n/(2n-1) sin^2 b_n p(n),
    rho_-1-1 = p(0) + sum ((n cos b_n + n-1)/(2n-1))^2 p(n).
    Off-diagonal motional elements cannot contribute: the propagator conserves
    total excitation, so each |-1, n> component evolves independently.
    """
    p = dist.weights
    ns = np.arange(p.size)
    f_up, f_mid, f_down = branch_factors(ns, np.array([params.xi * t]))
    up = math.fsum(p * f_up[:, 0] ** 2)
    mid = math.fsum(p * f_mid[:, 0] ** 2)
    down = math.fsum(p * f_down[:, 0] ** 2)
    return InternalOccupations(p_up=up, p_mid=mid, p_down=down, deficit=dist.deficit)


def occupations_case2(init: CaseTwoInit, t: float, params: PhysicalParams) -> InternalOccupations:
    """Internal occupations for the superposition (x) vacuum initial state.

    rho_11 = a^2/9 (2 + cos sqrt3 xi t)^2,
    rho_00 = a^2/3 sin^2(sqrt3 xi t) + b^2 cos^2(xi t),
    rho_-1-1 = 2a^2/9 (1 - cos sqrt3 xi t)^2 + b^2 sin^2(xi t) + c^2.
    """
    a, b, c = init.a, init.b, init.c
    xt = params.xi * t
    b2 = math.sqrt(3.0) * xt
    up = a * a / 9.0 * (2.0 + math.cos(b2)) ** 2
    mid = a * a / 3.0 * math.sin(b2) ** 2 + b * b * math.cos(xt) ** 2
    down = 2.0 * a * a / 9.0 * (1.0 - math.cos(b2)) ** 2 + b * b * math.sin(xt) ** 2 + c * c
    return InternalOccupations(p_up=up, p_mid=mid, p_down=down, deficit=0.0)


def _case1_branch_vectors(q: np.ndarray, xi_t: np.ndarray):
    """Branch vectors over the phonon index l, one column per time.

    v_down[l] = q(l) f_down(l), v_mid[l] = q(l+1) f_mid(l+1),
    v_up[l] = q(l+2) f_up(l+2); indices beyond the truncated initial
    distribution stay zero.
    """
    dim = q.size
    f_up, f_mid, f_down = branch_factors(np.arange(dim), xi_t)
    nt = f_down.shape[1]
    v_down = q[:, None] * f_down
    v_mid = np.zeros((dim, nt), dtype=complex)
    v_mid[: dim - 1] = q[1:, None] * f_mid[1:]
    v_up = np.zeros((dim, nt), dtype=complex)
    v_up[: dim - 2] = q[2:, None] * f_up[2:]
    return v_up, v_mid, v_down


def motional_case1(init: CaseOneInit, t: float, params: PhysicalParams) -> MotionalDensityMatrix:
    """Motional density matrix for ground ions (x) coherent state.

    Assembled as the sum of the three branch outer products, which is the
    closed-form element sum term by term and is Hermitian positive
    semidefinite by construction.
    """
    q = init.amplitudes(params.fock_cutoff)
    deficit = max(0.0, 1.0 - float((np.abs(q) ** 2).sum()))
    v_up, v_mid, v_down = _case1_branch_vectors(q, np.array([params.xi * t]))
    rho = np.zeros((q.size, q.size), dtype=complex)
    for v in (v_up, v_mid, v_down):
        w = v[:, 0]
        rho += np.outer(w, w.conj())
    return MotionalDensityMatrix(entries=rho, deficit=deficit)


def _case2_entries(init: CaseTwoInit, xi_t: np.ndarray):
    """The seven nonvanishing motional matrix elements for case 2, vectorized in t."""
    a, b, c = init.a, init.b, init.c
    e1 = np.exp(1j * init.phi1)
    e2 = np.exp(1j * init.phi2)
    xt = np.atleast_1d(xi_t)
    b2 = math.sqrt(3.0) * xt
    cos2, sin2 = np.cos(b2), np.sin(b2)
    cosx, sinx = np.cos(xt), np.sin(xt)
    rho00 = a * a / 9.0 * (2.0 + cos2) ** 2 + b * b * cosx**2 + c * c
    rho11 = a * a / 3.0 * sin2**2 + b * b * sinx**2
    rho22 = 2.0 * a * a / 9.0 * (1.0 - cos2) ** 2
    rho01 = (a * b / math.sqrt(3.0) * sin2 * cosx * e1
             + b * c * sinx * e2 * np.conj(e1))
    rho02 = math.sqrt(2.0) / 3.0 * a * c * (1.0 - cos2) * e2
    rho12 = math.sqrt(2.0) / 3.0 * a * b * (1.0 - cos2) * sinx * e1
    return rho00, rho11, rho22, rho01, rho02, rho12


def motional_case2(init: CaseTwoInit, t: float, params: PhysicalParams) -> MotionalDensityMatrix:
    """Motional density matrix for the superposition (x) vacuum family.

    Only rho_00, rho_11, rho_22 and the coherences rho_01, rho_02, rho_12 can
    be nonzero; the matrix is emitted at the full cutoff dimension for
    interface uniformity.
    """
    rho00, rho11, rho22, rho01, rho02, rho12 = _case2_entries(init, np.array([params.xi * t]))
    dim = params.dim
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = rho00[0]
    rho[1, 1] = rho11[0]
    rho[2, 2] = rho22[0]
    rho[0, 1] = rho01[0]
    rho[1, 0] = np.conj(rho01[0])
    rho[0, 2] = rho02[0]
    rho[2, 0] = np.conj(rho02[0])
    rho[1, 2] = rho12[0]
    rho[2, 1] = np.conj(rho12[0])
    return MotionalDensityMatrix(entries=rho, deficit=0.0)


def limit_coherent_form(n_mean: float, phase: float, dim: int = 3) -> MotionalDensityMatrix:
    """Weak-field reference matrix of a coherent state to order |alpha|^2.

    rho_00 = 1 - <n>, rho_11 = <n>, rho_01 = e^{i phase} sqrt(<n>) with
    phase = phi2 - phi1; everything else zero.
    """
    if not (0.0 <= n_mean < 1.0):
        raise ValueError(f"coherent weak-field form needs n_mean in [0, 1), got {n_mean}")
    if dim < 2:
        raise ValueError("dim must be >= 2")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0 - n_mean
    rho[1, 1] = n_mean
    rho[0, 1] = np.exp(1j * phase) * math.sqrt(n_mean)
    rho[1, 0] = np.conj(rho[0, 1])
    return MotionalDensityMatrix(entries=rho, deficit=0.0, _skip_checks=True)


def limit_squeezed_form(n_mean: float, phase: float, dim: int = 3) -> MotionalDensityMatrix:
    """Weak-field reference matrix of a squeezed vacuum.

    rho_00 = 1 - <n>/2, rho_22 = <n>/2, rho_02 = (1/sqrt2) e^{i phase}
    sqrt(<n>); everything else zero.  Meaningful for small <n> (the paper's
    regime is <n> <= 0.5).
    """
    if not (0.0 <= n_mean <= 2.0):
        raise ValueError(f"squeezed weak-field form needs n_mean in [0, 2], got {n_mean}")
    if dim < 3:
        raise ValueError("dim must be >= 3")
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0 - 0.5 * n_mean
    rho[2, 2] = 0.5 * n_mean
    rho[0, 2] = np.exp(1j * phase) * math.sqrt(n_mean) / math.sqrt(2.0)
    rho[2, 0] = np.conj(rho[0, 2])
    return MotionalDensityMatrix(entries=rho, deficit=0.0, _skip_checks=True)


@dataclass(frozen=True)
class EvolutionPoint:
    """One sampled time: internal occupations plus the motional matrix."""

    t: float
    occupations: InternalOccupations
    motional: MotionalDensityMatrix


def evaluate_case1(init: CaseOneInit, t: float, params: PhysicalParams) -> EvolutionPoint:
    dist = init.distribution(params.fock_cutoff)
    return EvolutionPoint(
        t=t,
        occupations=occupations_case1(dist, t, params),
        motional=motional_case1(init, t, params),
    )


def evaluate_case2(init: CaseTwoInit, t: float, params: PhysicalParams) -> EvolutionPoint:
    return EvolutionPoint(
        t=t,
        occupations=occupations_case2(init, t, params),
        motional=motional_case2(init, t, params),
    )


@dataclass(frozen=True)
class MomentSeries:
    """Observable moments on a time grid, shared by scans and figure runs.

    s1 = sum_l sqrt(l+1) rho_{l,l+1} and s2 = sum_l sqrt((l+1)(l+2))
    rho_{l,l+2} are the two coherence sums entering the quadrature variances;
    occupations ride along for the occupation figures.
    """

    t: np.ndarray
    n_mean: np.ndarray
    s1: np.ndarray
    s2: np.ndarray
    occ_up: np.ndarray
    occ_mid: np.ndarray
    occ_down: np.ndarray
    deficit: float

    def gamma(self) -> np.ndarray:
        """Coherent fraction |<a>|^2 / <n>; NaN where <n> = 0."""
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.n_mean > 0.0, np.abs(self.s1) ** 2 / self.n_mean, np.nan)


def case1_series(init: CaseOneInit, ts: np.ndarray, params: PhysicalParams) -> MomentSeries:
    """Vectorized case-1 moments over a time grid (one branch-matrix pass)."""
    ts = np.asarray(ts, dtype=float)
    q = init.amplitudes(params.fock_cutoff)
    deficit = max(0.0, 1.0 - float((np.abs(q) ** 2).sum()))
    v_up, v_mid, v_down = _case1_branch_vectors(q, params.xi * ts)
    ls = np.arange(q.size)
    diag = sum(np.abs(v) ** 2 for v in (v_up, v_mid, v_down))
    n_mean = (ls[:, None] * diag).sum(axis=0)
    w1 = np.sqrt(ls[:-1] + 1.0)[:, None]
    w2 = np.sqrt((ls[:-2] + 1.0) * (ls[:-2] + 2.0))[:, None]
    s1 = sum((w1 * (v[:-1] * v[1:].conj())).sum(axis=0) for v in (v_up, v_mid, v_down))
    s2 = sum((w2 * (v[:-2] * v[2:].conj())).sum(axis=0) for v in (v_up, v_mid, v_down))
    occ = [(np.abs(v) ** 2).sum(axis=0) for v in (v_up, v_mid, v_down)]
    return MomentSeries(
        t=ts, n_mean=n_mean, s1=s1, s2=s2,
        occ_up=occ[0], occ_mid=occ[1], occ_down=occ[2], deficit=deficit,
    )


def distribution_series(dist: PhononDistribution, ts: np.ndarray, params: PhysicalParams) -> MomentSeries:
    """Moments for ground ions (x) any diagonal phonon distribution.

    A diagonal mixture of |-1, n> components keeps the motional matrix
    diagonal for all times (each component is pure within one excitation
    subspace), so both coherence sums vanish identically and the phonon mean
    follows from excitation conservation.
    """
    ts = np.asarray(ts, dtype=float)
    p = dist.weights
    f_up, f_mid, f_down = branch_factors(np.arange(p.size), params.xi * ts)
    occ_up = p @ f_up**2
    occ_mid = p @ f_mid**2
    occ_down = p @ f_down**2
    n_mean = dist.mean() - (2.0 * occ_up + occ_mid)
    zeros = np.zeros_like(ts, dtype=complex)
    return MomentSeries(
        t=ts, n_mean=n_mean, s1=zeros, s2=zeros.copy(),
        occ_up=occ_up, occ_mid=occ_mid, occ_down=occ_down, deficit=dist.deficit,
    )


def case2_series(init: CaseTwoInit, ts: np.ndarray, params: PhysicalParams) -> MomentSeries:
    """Vectorized case-2 moments from the seven nonvanishing matrix elements."""
    ts = np.asarray(ts, dtype=float)
    rho00, rho11, rho22, rho01, rho02, rho12 = _case2_entries(init, params.xi * ts)
    n_mean = rho11 + 2.0 * rho22
    s1 = rho01 + math.sqrt(2.0) * rho12
    s2 = math.sqrt(2.0) * rho02
    a, b, c = init.a, init.b, init.c
    xt = params.xi * ts
    b2 = math.sqrt(3.0) * xt
    occ_up = a * a / 9.0 * (2.0 + np.cos(b2)) ** 2
    occ_mid = a * a / 3.0 * np.sin(b2) ** 2 + b * b * np.cos(xt) ** 2
    occ_down = 2.0 * a * a / 9.0 * (1.0 - np.cos(b2)) ** 2 + b * b * np.sin(xt) ** 2 + c * c
    return MomentSeries(
        t=ts, n_mean=n_mean, s1=s1, s2=s2,
        occ_up=occ_up, occ_mid=occ_mid, occ_down=occ_down, deficit=0.0,
    )
