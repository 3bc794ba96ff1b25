"""Brute-force verifier: numerical evolution on the truncated product space.

Builds the red-sideband coupling H = i 2^(1/2) eta Omega (a+ J- - a J+) as a
dense Hermitian matrix over all |jz, m> with m <= cutoff and evolves states by
eigendecomposition, U(t) = V exp(-i w t) V+.  This path shares no evolution
formula with :mod:`ionjcm.closed_form`; only the model-core types and the
initial-state constructors are common, so agreement between the two is a real
check.  The overall sign of the coupling (a pure phase convention on the
jz = 0 manifold) is fixed so that exp(-iHt) reproduces the analytic subspace
propagator exactly as written; the tests pin this entrywise.

Couplings out of the truncated space are dropped (hard cutoff).  That keeps H
Hermitian and exactly excitation-conserving, so unitarity and block structure
hold to machine precision; what truncation costs is fidelity to the infinite
space, tracked by the initial tail deficit and the weight sitting in the
incomplete top subspaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import BasisLabel, InternalOccupations, InvariantError, MotionalDensityMatrix, PhysicalParams
from .states import CaseOneInit, CaseTwoInit

__all__ = [
    "TruncatedHamiltonian",
    "build_hamiltonian",
    "evolve",
    "evolve_vector",
    "partial_trace_internal",
    "partial_trace_motional",
    "case1_vector",
    "case2_vector",
    "TruncationReport",
]

JZ_ORDER = (-1, 0, 1)


class TruncatedHamiltonian:
    """Dense interaction Hamiltonian on the 3 * (cutoff + 1) product space."""

    def __init__(self, params: PhysicalParams):
        self.params = params
        m = params.dim
        self.dim = 3 * m
        self.labels = tuple(
            BasisLabel(jz, ph) for jz in JZ_ORDER for ph in range(m)
        )
        h = np.zeros((self.dim, self.dim), dtype=complex)
        coupling = 1j * math.sqrt(2.0) * params.eta * params.omega_rabi
        for jz in (0, 1):  # |jz, ph> -> |jz-1, ph+1>, red-sideband exchange
            for ph in range(params.fock_cutoff):
                i = self.index(jz - 1, ph + 1)
                j = self.index(jz, ph)
                h[i, j] = coupling * math.sqrt(ph + 1)
                h[j, i] = np.conj(h[i, j])
        self.matrix = h
        self._eig = None

    def index(self, jz: int, phonons: int) -> int:
        m = self.params.dim
        return (jz + 1) * m + phonons

    def eig(self):
        if self._eig is None:
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig

    def propagator(self, t: float) -> np.ndarray:
        w, v = self.eig()
        return (v * np.exp(-1j * w * t)) @ v.conj().T

    def subspace_block(self, n: int, t: float) -> np.ndarray:
        """exp(-iHt) restricted to the excitation-n subspace (must be complete)."""
        from .core import subspace_members

        members = subspace_members(n)
        if any(lab.phonons > self.params.fock_cutoff for lab in members):
            raise ValueError(f"subspace {n} is not complete at cutoff {self.params.fock_cutoff}")
        idx = [self.index(lab.jz, lab.phonons) for lab in members]
        return self.propagator(t)[np.ix_(idx, idx)]


@lru_cache(maxsize=16)
def _cached_hamiltonian(eta: float, omega_rabi: float, g: float, cutoff: int) -> TruncatedHamiltonian:
    return TruncatedHamiltonian(PhysicalParams(eta=eta, omega_rabi=omega_rabi, g=g, fock_cutoff=cutoff))


def build_hamiltonian(params: PhysicalParams) -> TruncatedHamiltonian:
    return _cached_hamiltonian(params.eta, params.omega_rabi, params.g, params.fock_cutoff)


@dataclass(frozen=True)
class TruncationReport:
    """How much of the state the hard cutoff can bite."""

    cutoff: int
    initial_deficit: float
    top_band_weight: float  # weight in the incomplete subspaces n > cutoff


def case1_vector(init: CaseOneInit, params: PhysicalParams) -> np.ndarray:
    """|psi(0)> = sum_m q(m) |-1, m>, truncated at the cutoff (not renormalized)."""
    h = build_hamiltonian(params)
    psi = np.zeros(h.dim, dtype=complex)
    q = init.amplitudes(params.fock_cutoff)
    psi[h.index(-1, 0) : h.index(-1, 0) + q.size] = q
    return psi


def case2_vector(init: CaseTwoInit, params: PhysicalParams) -> np.ndarray:
    """|psi(0)> = (a|+1> + b e^{i phi1}|0> + c e^{i phi2}|-1>) (x) |0>_vib."""
    h = build_hamiltonian(params)
    psi = np.zeros(h.dim, dtype=complex)
    psi[h.index(1, 0)] = init.a
    psi[h.index(0, 0)] = init.b * np.exp(1j * init.phi1)
    psi[h.index(-1, 0)] = init.c * np.exp(1j * init.phi2)
    return psi


def evolve_vector(psi0: np.ndarray, t: float, params: PhysicalParams) -> np.ndarray:
    """Pure-state evolution exp(-iHt)|psi0>."""
    h = build_hamiltonian(params)
    if psi0.shape != (h.dim,):
        raise ValueError(f"state dimension {psi0.shape} does not match space {h.dim}")
    w, v = h.eig()
    return v @ (np.exp(-1j * w * t) * (v.conj().T @ psi0))


def evolve(state: np.ndarray, t: float, params: PhysicalParams) -> np.ndarray:
    """U rho U+ for a density matrix, or the projector of an evolved pure state."""
    state = np.asarray(state, dtype=complex)
    if state.ndim == 1:
        psi = evolve_vector(state, t, params)
        return np.outer(psi, psi.conj())
    h = build_hamiltonian(params)
    if state.shape != (h.dim, h.dim):
        raise ValueError(f"density matrix shape {state.shape} does not match space {h.dim}")
    u = h.propagator(t)
    rho = u @ state @ u.conj().T
    return 0.5 * (rho + rho.conj().T)  # scrub matmul rounding off hermiticity


def partial_trace_internal(rho_full: np.ndarray, deficit: float = 0.0) -> MotionalDensityMatrix:
    """Trace out the internal states, leaving the phonon-mode matrix."""
    m = rho_full.shape[0] // 3
    r = rho_full.reshape(3, m, 3, m)
    rho_vib = np.einsum("imin->mn", r)
    return MotionalDensityMatrix(entries=rho_vib, deficit=deficit)


def partial_trace_motional(rho_full: np.ndarray):
    """Trace out the phonons: (occupations, full 3x3 internal matrix).

    The 3x3 matrix is ordered (jz = -1, 0, +1); its off-diagonals are kept
    for diagnostics even though the occupations are what the closed forms
    predict.
    """
    m = rho_full.shape[0] // 3
    r = rho_full.reshape(3, m, 3, m)
    internal = np.einsum("imjm->ij", r)
    diag = internal.diagonal().real
    leak = 1.0 - float(diag.sum())
    occ = InternalOccupations(
        p_up=float(diag[2]), p_mid=float(diag[1]), p_down=float(diag[0]),
        deficit=max(0.0, leak),
    )
    return occ, internal


def excitation_expectation(rho_full: np.ndarray, params: PhysicalParams) -> float:
    """<(jz + 1) + n> under the truncated-space state."""
    h = build_hamiltonian(params)
    weights = np.array([lab.total_excitation() for lab in h.labels], dtype=float)
    return float(weights @ rho_full.diagonal().real)


def truncation_report(psi0: np.ndarray, params: PhysicalParams, initial_deficit: float = 0.0) -> TruncationReport:
    """Weight of the initial state in the incomplete top subspaces."""
    h = build_hamiltonian(params)
    cutoff = params.fock_cutoff
    top = [i for i, lab in enumerate(h.labels) if lab.total_excitation() > cutoff]
    w = float((np.abs(psi0[top]) ** 2).sum()) if top else 0.0
    return TruncationReport(cutoff=cutoff, initial_deficit=initial_deficit, top_band_weight=w)


def check_unitarity(rho0: np.ndarray, rho_t: np.ndarray, tol: float = 1e-11):
    """Raise if evolution failed to preserve trace or purity."""
    tr0, trt = rho0.trace().real, rho_t.trace().real
    if abs(tr0 - trt) > tol:
        raise InvariantError("oracle", f"trace drifted by {abs(tr0 - trt):.3e}")
    p0 = (rho0 @ rho0).trace().real
    pt = (rho_t @ rho_t).trace().real
    if abs(p0 - pt) > tol:
        raise InvariantError("oracle", f"purity drifted by {abs(p0 - pt):.3e}")
