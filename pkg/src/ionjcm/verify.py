"""Cross-checks between every closed form and the brute-force evolver.

The seeded battery draws random initial conditions and times from both
families and compares, entrywise: internal occupations, motional density
matrices, propagator blocks against exp(-iHt), block unitarity, excitation
conservation and subspace support.  All deviations should sit at machine
precision; the acceptance gate is 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_form, oracle
from .core import PhysicalParams, subspace_members
from .propagator import block_propagator, subspace_propagator
from .states import CaseOneInit, CaseTwoInit

__all__ = ["VerificationReport", "verify_oracle", "ORACLE_TOL"]

ORACLE_TOL = 1e-9


@dataclass(frozen=True)
class VerificationReport:
    """Max absolute deviation per check, plus the sample counts behind them."""

    deviations: dict[str, float]
    samples: dict[str, int]
    seed: int
    tolerance: float = ORACLE_TOL

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values())

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


def _random_case1(rng) -> CaseOneInit:
    return CaseOneInit(r=math.sqrt(rng.uniform(0.05, 4.0)), phi=rng.uniform(-math.pi, math.pi))


def _random_case2(rng) -> CaseTwoInit:
    w = rng.dirichlet((1.0, 1.0, 1.0))
    a, b, c = np.sqrt(w)
    phi1, phi2 = rng.uniform(-math.pi, math.pi, size=2)
    return CaseTwoInit(a=a, b=b, c=c, phi1=phi1, phi2=phi2)


def verify_oracle(params: PhysicalParams | None = None, seed: int = 20260810,
                  trials: int = 200, t_max: float = 600e-6) -> VerificationReport:
    """Run the full battery; ``trials`` splits evenly across the two families."""
    params = params or PhysicalParams(fock_cutoff=30)
    rng = np.random.default_rng(seed)
    dev: dict[str, float] = {k: 0.0 for k in (
        "occupations_case1", "motional_case1",
        "occupations_case2", "motional_case2",
        "propagator_blocks", "block_unitarity",
        "excitation_conservation", "subspace_support",
    )}
    cnt: dict[str, int] = {k: 0 for k in dev}

    h = oracle.build_hamiltonian(params)

    for _ in range(trials // 2):
        init = _random_case1(rng)
        t = rng.uniform(0.0, t_max)
        psi = oracle.evolve_vector(oracle.case1_vector(init, params), t, params)
        rho_full = np.outer(psi, psi.conj())
        occ_num, _ = oracle.partial_trace_motional(rho_full)
        vib_num = oracle.partial_trace_internal(rho_full)

        dist = init.distribution(params.fock_cutoff)
        occ_cf = closed_form.occupations_case1(dist, t, params)
        d = max(abs(x - y) for x, y in zip(occ_cf.as_tuple(), occ_num.as_tuple()))
        dev["occupations_case1"] = max(dev["occupations_case1"], d)
        cnt["occupations_case1"] += 1

        vib_cf = closed_form.motional_case1(init, t, params)
        dev["motional_case1"] = max(
            dev["motional_case1"], float(np.abs(vib_cf.entries - vib_num.entries).max())
        )
        cnt["motional_case1"] += 1

        psi0 = oracle.case1_vector(init, params)
        e0 = oracle.excitation_expectation(np.outer(psi0, psi0.conj()), params)
        et = oracle.excitation_expectation(rho_full, params)
        dev["excitation_conservation"] = max(dev["excitation_conservation"], abs(et - e0))
        cnt["excitation_conservation"] += 1

    for _ in range(trials - trials // 2):
        init = _random_case2(rng)
        t = rng.uniform(0.0, t_max)
        psi = oracle.evolve_vector(oracle.case2_vector(init, params), t, params)
        rho_full = np.outer(psi, psi.conj())
        occ_num, _ = oracle.partial_trace_motional(rho_full)
        vib_num = oracle.partial_trace_internal(rho_full)

        occ_cf = closed_form.occupations_case2(init, t, params)
        d = max(abs(x - y) for x, y in zip(occ_cf.as_tuple(), occ_num.as_tuple()))
        dev["occupations_case2"] = max(dev["occupations_case2"], d)
        cnt["occupations_case2"] += 1

        vib_cf = closed_form.motional_case2(init, t, params)
        dev["motional_case2"] = max(
            dev["motional_case2"], float(np.abs(vib_cf.entries - vib_num.entries).max())
        )
        cnt["motional_case2"] += 1

    # propagator blocks vs exp(-iHt), unitarity, and subspace support
    for _ in range(40):
        t = rng.uniform(0.0, t_max)
        for n in rng.integers(0, params.fock_cutoff + 1, size=4):
            n = int(n)
            blk = subspace_propagator(n, t, params).matrix
            num = h.subspace_block(n, t)
            dev["propagator_blocks"] = max(
                dev["propagator_blocks"], float(np.abs(blk - num).max())
            )
            cnt["propagator_blocks"] += 1
        u = block_propagator(t, params)
        m = u.matrix()
        dev["block_unitarity"] = max(
            dev["block_unitarity"], float(np.abs(m.T @ m - np.eye(u.dim)).max())
        )
        cnt["block_unitarity"] += 1

        n = int(rng.integers(1, params.fock_cutoff + 1))
        members = subspace_members(n)
        amp = rng.normal(size=len(members)) + 1j * rng.normal(size=len(members))
        amp /= np.linalg.norm(amp)
        psi0 = np.zeros(h.dim, dtype=complex)
        for lab, a in zip(members, amp):
            psi0[h.index(lab.jz, lab.phonons)] = a
        psi_t = oracle.evolve_vector(psi0, t, params)
        outside = np.ones(h.dim, dtype=bool)
        for lab in members:
            outside[h.index(lab.jz, lab.phonons)] = False
        dev["subspace_support"] = max(
            dev["subspace_support"], float(np.abs(psi_t[outside]).max())
        )
        cnt["subspace_support"] += 1

    return VerificationReport(deviations=dev, samples=cnt, seed=seed)
