import math

import numpy as np
import pytest

from ionjcm.core import (
    BasisLabel,
    InternalOccupations,
    InvariantError,
    MotionalDensityMatrix,
    PhysicalParams,
    default_cutoff,
    subspace_members,
    total_excitation,
)


class TestPhysicalParams:
    def test_xi_definition(self):
        p = PhysicalParams(eta=0.1, omega_rabi=2 * math.pi * 5e5, g=1.0, fock_cutoff=10)
        assert p.xi == math.sqrt(2) * 0.1 * 2 * math.pi * 5e5

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"eta": 0.0},
            {"eta": -0.1},
            {"omega_rabi": 0.0},
            {"g": -1.0},
            {"fock_cutoff": 1},
            {"fock_cutoff": 2.5},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            PhysicalParams(**kwargs)

    def test_dim(self):
        assert PhysicalParams(fock_cutoff=7).dim == 8


class TestBasis:
    @pytest.mark.parametrize(
        "jz,phonons,expected",
        [(-1, 0, 0), (1, 0, 2), (0, 4, 5)],
    )
    def test_total_excitation(self, jz, phonons, expected):
        assert total_excitation(BasisLabel(jz, phonons)) == expected

    def test_subspace_members(self):
        assert subspace_members(0) == [BasisLabel(-1, 0)]
        assert subspace_members(1) == [BasisLabel(0, 0), BasisLabel(-1, 1)]
        assert subspace_members(3) == [BasisLabel(1, 1), BasisLabel(0, 2), BasisLabel(-1, 3)]

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            subspace_members(-1)
        with pytest.raises(ValueError):
            BasisLabel(2, 0)
        with pytest.raises(ValueError):
            BasisLabel(0, -1)

    def test_subspaces_partition_basis(self):
        # every label with phonons <= cutoff appears in exactly one subspace
        cutoff = 9
        seen = set()
        for n in range(cutoff + 3):
            for lab in subspace_members(n):
                assert lab.total_excitation() == n
                if lab.phonons <= cutoff:
                    assert lab not in seen
                    seen.add(lab)
        expected = {BasisLabel(jz, m) for jz in (-1, 0, 1) for m in range(cutoff + 1)}
        assert seen == expected


class TestDefaultCutoff:
    def test_policy_value(self):
        assert default_cutoff(8.0) == math.ceil(8.0 + 8 * math.sqrt(8.0) + 12)

    @pytest.mark.parametrize("mean", [0.5, 1.0, 4.0, 8.0, 16.0])
    def test_poisson_tail_below_budget(self, mean):
        cutoff = default_cutoff(mean)
        # Poisson tail by the same multiplicative recurrence the code uses
        p = math.exp(-mean)
        total = p
        for n in range(1, cutoff + 1):
            p *= mean / n
            total += p
        assert 1.0 - total < 1e-12


class TestInternalOccupations:
    def test_sum_and_tuple(self):
        occ = InternalOccupations(0.2, 0.3, 0.5)
        assert occ.total() == pytest.approx(1.0, abs=1e-15)
        assert occ.as_tuple() == (0.2, 0.3, 0.5)

    def test_rejects_out_of_range(self):
        with pytest.raises(InvariantError):
            InternalOccupations(-0.01, 0.5, 0.5)
        with pytest.raises(InvariantError):
            InternalOccupations(0.5, 1.1, 0.0)


class TestMotionalDensityMatrix:
    def test_accepts_valid(self):
        rho = MotionalDensityMatrix(np.diag([0.5, 0.3, 0.2]).astype(complex))
        assert rho.dim == 3
        assert rho.trace() == pytest.approx(1.0)

    def test_rejects_non_hermitian(self):
        m = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(InvariantError):
            MotionalDensityMatrix(m)

    def test_rejects_negative_diagonal(self):
        with pytest.raises(InvariantError):
            MotionalDensityMatrix(np.diag([1.1, -0.1]).astype(complex))

    def test_trace_must_match_deficit(self):
        with pytest.raises(InvariantError):
            MotionalDensityMatrix(np.diag([0.4, 0.4]).astype(complex), deficit=0.0)
        ok = MotionalDensityMatrix(np.diag([0.4, 0.4]).astype(complex), deficit=0.2)
        assert ok.deficit == 0.2

    def test_smallest_eigenvalue(self):
        rho = MotionalDensityMatrix(np.diag([1.0, 0.0]).astype(complex))
        assert rho.smallest_eigenvalue() == pytest.approx(0.0, abs=1e-15)
