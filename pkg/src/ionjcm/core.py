"""Physical parameters, basis bookkeeping and shared numeric types.

Two ions share one quantized center-of-mass (COM) phonon mode.  The collective
internal state is labelled by the J_z quantum number jz in {-1, 0, +1}
(-1: both ions ground, 0: one excited, +1: both excited).  The red-sideband
coupling conserves the total excitation (jz + 1) + phonons, which organizes
the Hilbert space into subspaces of dimension at most 3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PhysicalParams",
    "BasisLabel",
    "InternalOccupations",
    "MotionalDensityMatrix",
    "InvariantError",
    "total_excitation",
    "subspace_members",
    "default_cutoff",
]

#: Paper-typical defaults: Lamb-Dicke 0.1, Rabi frequency 2*pi*500 kHz.
DEFAULT_ETA = 0.1
DEFAULT_OMEGA_RABI = 2.0 * math.pi * 5.0e5


class InvariantError(RuntimeError):
    """A numerical invariant (positivity, trace, unitarity) was violated.

    ``module`` names the component at fault so the CLI can report it.
    """

    def __init__(self, module: str, message: str):
        super().__init__(f"[{module}] {message}")
        self.module = module


@dataclass(frozen=True)
class PhysicalParams:
    """Lamb-Dicke parameter, Rabi frequency, quadrature unit and Fock cutoff.

    ``g`` only scales reported quadrature variances (everything is emitted in
    units of g^2); it never enters the dynamics.
    """

    eta: float = DEFAULT_ETA
    omega_rabi: float = DEFAULT_OMEGA_RABI
    g: float = 1.0
    fock_cutoff: int = 30

    def __post_init__(self):
        if not (self.eta > 0):
            raise ValueError(f"eta must be > 0, got {self.eta}")
        if not (self.omega_rabi > 0):
            raise ValueError(f"omega_rabi must be > 0, got {self.omega_rabi}")
        if not (self.g > 0):
            raise ValueError(f"g must be > 0, got {self.g}")
        if not isinstance(self.fock_cutoff, (int, np.integer)) or self.fock_cutoff < 2:
            raise ValueError(f"fock_cutoff must be an integer >= 2, got {self.fock_cutoff}")

    @property
    def xi(self) -> float:
        """Effective sideband coupling sqrt(2) * eta * omega_rabi (rad/s)."""
        return math.sqrt(2.0) * self.eta * self.omega_rabi

    @property
    def dim(self) -> int:
        """Dimension of the truncated phonon space, fock_cutoff + 1."""
        return self.fock_cutoff + 1


@dataclass(frozen=True, order=True)
class BasisLabel:
    """Product-basis label |jz, phonons>."""

    jz: int
    phonons: int

    def __post_init__(self):
        if self.jz not in (-1, 0, 1):
            raise ValueError(f"jz must be -1, 0 or +1, got {self.jz}")
        if self.phonons < 0:
            raise ValueError(f"phonons must be >= 0, got {self.phonons}")

    def total_excitation(self) -> int:
        return (self.jz + 1) + self.phonons


def total_excitation(label: BasisLabel) -> int:
    """Electronic excitations plus phonon number; conserved by the coupling."""
    return label.total_excitation()


def subspace_members(n: int) -> list[BasisLabel]:
    """Ordered basis of the subspace with total excitation ``n``.

    n >= 2 gives the full triple [(+1, n-2), (0, n-1), (-1, n)]; n = 1 the
    pair [(0, 0), (-1, 1)]; n = 0 the global ground state alone.
    """
    if n < 0:
        raise ValueError(f"excitation index must be >= 0, got {n}")
    if n == 0:
        return [BasisLabel(-1, 0)]
    if n == 1:
        return [BasisLabel(0, 0), BasisLabel(-1, 1)]
    return [BasisLabel(1, n - 2), BasisLabel(0, n - 1), BasisLabel(-1, n)]


def default_cutoff(mean_phonons: float) -> int:
    """Fock cutoff for a coherent state of the given mean phonon number.

    ceil(mean + 8*sqrt(mean) + 12) leaves Poisson tail mass below 1e-12 for
    means up to 16 (the largest case of interest is mean 8).
    """
    if mean_phonons < 0:
        raise ValueError("mean_phonons must be >= 0")
    return max(2, math.ceil(mean_phonons + 8.0 * math.sqrt(mean_phonons) + 12.0))


@dataclass(frozen=True)
class InternalOccupations:
    """Diagonal of the internal-state density matrix (jz = +1, 0, -1).

    Stored as raw sums over the truncated phonon distribution; with the
    truncation ``deficit`` added back the triple sums to one.  Values are
    never renormalized in storage.
    """

    p_up: float
    p_mid: float
    p_down: float
    deficit: float = 0.0

    _TOL = 1e-12

    def __post_init__(self):
        for name in ("p_up", "p_mid", "p_down"):
            v = getattr(self, name)
            if not (-self._TOL <= v <= 1.0 + self._TOL):
                raise InvariantError("core", f"occupation {name}={v} outside [0, 1]")

    def total(self) -> float:
        return self.p_up + self.p_mid + self.p_down

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.p_up, self.p_mid, self.p_down)


@dataclass(frozen=True)
class MotionalDensityMatrix:
    """Truncated phonon-mode density matrix rho_lm = <l|rho|m>.

    Hermitian by construction; the trace may fall short of one by the
    explicitly carried truncation ``deficit``.
    """

    entries: np.ndarray
    deficit: float = 0.0
    _skip_checks: bool = field(default=False, repr=False, compare=False)

    HERM_TOL = 1e-12
    DIAG_TOL = 1e-12
    TRACE_TOL = 1e-10

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        object.__setattr__(self, "entries", rho)
        if self._skip_checks:
            return
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"entries must be a square matrix, got shape {rho.shape}")
        herm = np.abs(rho - rho.conj().T).max() if rho.size else 0.0
        if herm > self.HERM_TOL:
            raise InvariantError("core", f"matrix not Hermitian: max deviation {herm:.3e}")
        diag = rho.diagonal()
        if np.abs(diag.imag).max(initial=0.0) > self.DIAG_TOL:
            raise InvariantError("core", "diagonal entries must be real")
        if diag.real.min(initial=0.0) < -self.DIAG_TOL:
            raise InvariantError("core", f"negative diagonal entry {diag.real.min():.3e}")
        tr = diag.real.sum()
        if not (1.0 - self.deficit - self.TRACE_TOL <= tr <= 1.0 + self.TRACE_TOL):
            raise InvariantError(
                "core",
                f"trace {tr:.12f} inconsistent with truncation deficit {self.deficit:.3e}",
            )

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def cutoff(self) -> int:
        return self.dim - 1

    def trace(self) -> float:
        return float(self.entries.diagonal().real.sum())

    def diagonal(self) -> np.ndarray:
        return self.entries.diagonal().real.copy()

    def smallest_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries).min())
