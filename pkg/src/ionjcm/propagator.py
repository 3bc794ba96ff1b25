"""Exact per-subspace time evolution of the two-ion red-sideband coupling.

Within the subspace of total excitation n >= 2 the propagator is the real
orthogonal 3x3 rotation

    [ ((n-1) cos b + n) / (2n-1)     -sqrt((n-1)/(2n-1)) sin b    sqrt(n(n-1))/(2n-1) (1 - cos b) ]
    [ sqrt((n-1)/(2n-1)) sin b        cos b                       -sqrt(n/(2n-1)) sin b           ]
    [ sqrt(n(n-1))/(2n-1) (1 - cos b) sqrt(n/(2n-1)) sin b        (n cos b + n - 1) / (2n-1)      ]

in the basis [(+1, n-2), (0, n-1), (-1, n)], with Rabi angle
b = sqrt(2n-1) * xi * t and xi = sqrt(2) * eta * omega_rabi.  n = 1 reduces to
the plain 2x2 rotation by xi*t; n = 0 is invariant.  The sign convention of
the off-diagonal sines is fixed so each block equals exp(-iHt) for the
Hamiltonian built in :mod:`ionjcm.oracle` (verified entrywise in the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BasisLabel, PhysicalParams, subspace_members

__all__ = [
    "SubspacePropagator",
    "BlockPropagator",
    "subspace_propagator",
    "block_propagator",
]


@dataclass(frozen=True)
class SubspacePropagator:
    """Orthogonal block for one excitation subspace at one time."""

    n: int
    t: float
    beta: float
    matrix: np.ndarray  # (3,3) for n>=2, (2,2) for n=1, (1,1) for n=0

    def basis(self) -> list[BasisLabel]:
        return subspace_members(self.n)

    def orthogonality_defect(self) -> float:
        u = self.matrix
        return float(np.abs(u.T @ u - np.eye(u.shape[0])).max())


def subspace_propagator(n: int, t: float, params: PhysicalParams) -> SubspacePropagator:
    """Propagator block for total excitation ``n`` at time ``t`` (seconds)."""
    if n < 0:
        raise ValueError(f"excitation index must be >= 0, got {n}")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if n == 0:
        return SubspacePropagator(0, t, 0.0, np.ones((1, 1)))

    beta = math.sqrt(2 * n - 1) * params.xi * t
    c, s = math.cos(beta), math.sin(beta)
    if n == 1:
        m = np.array([[c, -s], [s, c]])
        return SubspacePropagator(1, t, beta, m)

    d = 2 * n - 1
    r_up = math.sqrt((n - 1) / d)   # couples (+1, n-2) <-> (0, n-1)
    r_dn = math.sqrt(n / d)         # couples (0, n-1) <-> (-1, n)
    q = math.sqrt(n * (n - 1)) / d
    m = np.array(
        [
            [((n - 1) * c + n) / d, -r_up * s, q * (1.0 - c)],
            [r_up * s, c, -r_dn * s],
            [q * (1.0 - c), r_dn * s, (n * c + n - 1) / d],
        ]
    )
    return SubspacePropagator(n, t, beta, m)


@dataclass(frozen=True)
class BlockPropagator:
    """Block-diagonal propagator over all complete subspaces within a cutoff.

    Subspaces whose (-1, n) member would exceed the Fock cutoff (n = cutoff+1
    and cutoff+2) are excluded; ``excluded_subspaces`` records them.
    """

    t: float
    cutoff: int
    blocks: tuple[SubspacePropagator, ...]
    labels: tuple[BasisLabel, ...]
    excluded_subspaces: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.labels)

    def matrix(self) -> np.ndarray:
        """Dense matrix in the excitation-ordered basis ``labels``."""
        u = np.zeros((self.dim, self.dim))
        pos = 0
        for blk in self.blocks:
            d = blk.matrix.shape[0]
            u[pos : pos + d, pos : pos + d] = blk.matrix
            pos += d
        return u


def block_propagator(t: float, params: PhysicalParams) -> BlockPropagator:
    """Assemble subspace blocks for every n whose members fit the cutoff."""
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    cutoff = params.fock_cutoff
    blocks = tuple(subspace_propagator(n, t, params) for n in range(cutoff + 1))
    labels = tuple(lab for n in range(cutoff + 1) for lab in subspace_members(n))
    return BlockPropagator(
        t=t,
        cutoff=cutoff,
        blocks=blocks,
        labels=labels,
        excluded_subspaces=(cutoff + 1, cutoff + 2),
    )
