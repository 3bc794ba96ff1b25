import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ionjcm.core import PhysicalParams
from ionjcm.oracle import build_hamiltonian
from ionjcm.propagator import block_propagator, subspace_propagator

PARAMS = PhysicalParams(eta=0.1, omega_rabi=2 * math.pi * 5e5, fock_cutoff=10)


class TestSubspacePropagator:
    def test_ground_subspace_invariant(self):
        for t in (0.0, 1e-6, 3e-4):
            u = subspace_propagator(0, t, PARAMS)
            np.testing.assert_array_equal(u.matrix, [[1.0]])

    def test_identity_at_t0(self):
        for n in range(8):
            u = subspace_propagator(n, 0.0, PARAMS).matrix
            np.testing.assert_allclose(u, np.eye(u.shape[0]), atol=1e-15)

    def test_n2_at_beta_pi(self):
        # cos b = -1, sin b = 0 in the n = 2 matrix, orthogonal by hand
        t = math.pi / (math.sqrt(3.0) * PARAMS.xi)
        u = subspace_propagator(2, t, PARAMS)
        assert u.beta == pytest.approx(math.pi, rel=1e-12)
        expected = np.array(
            [
                [1.0 / 3.0, 0.0, 2.0 * math.sqrt(2.0) / 3.0],
                [0.0, -1.0, 0.0],
                [2.0 * math.sqrt(2.0) / 3.0, 0.0, -1.0 / 3.0],
            ]
        )
        np.testing.assert_allclose(u.matrix, expected, atol=1e-12)

    def test_beta_definition(self):
        # sqrt(2(2n-1)) eta Omega t, written as sqrt(2n-1) xi t
        for n in (1, 2, 5, 9):
            u = subspace_propagator(n, 2.2e-5, PARAMS)
            assert u.beta == pytest.approx(
                math.sqrt(2 * (2 * n - 1)) * PARAMS.eta * PARAMS.omega_rabi * 2.2e-5, rel=1e-14
            )

    def test_n1_is_plane_rotation(self):
        t = 0.731e-5
        u = subspace_propagator(1, t, PARAMS).matrix
        b = PARAMS.xi * t
        np.testing.assert_allclose(
            u, [[math.cos(b), -math.sin(b)], [math.sin(b), math.cos(b)]], atol=1e-15
        )

    def test_rejects_negative_arguments(self):
        with pytest.raises(ValueError):
            subspace_propagator(-1, 1e-6, PARAMS)
        with pytest.raises(ValueError):
            subspace_propagator(2, -1e-6, PARAMS)

    def test_n5_matches_oracle_block(self):
        # entrywise agreement with exp(-iHt) restricted to the subspace
        t = 1e-6
        u = subspace_propagator(5, t, PARAMS)
        assert u.orthogonality_defect() <= 1e-12
        h = build_hamiltonian(PARAMS)
        num = h.subspace_block(5, t)
        assert np.abs(num.imag).max() < 1e-12
        np.testing.assert_allclose(u.matrix, num.real, atol=1e-9)

    @given(
        st.integers(min_value=0, max_value=60),
        st.floats(min_value=0.0, max_value=1e-3),
    )
    @settings(max_examples=250, deadline=None)
    def test_orthogonality_random(self, n, t):
        assert subspace_propagator(n, t, PARAMS).orthogonality_defect() <= 1e-12

    @given(
        st.integers(min_value=0, max_value=40),
        st.floats(min_value=0.0, max_value=5e-4),
        st.floats(min_value=0.0, max_value=5e-4),
    )
    @settings(max_examples=100, deadline=None)
    def test_one_parameter_group(self, n, t1, t2):
        u1 = subspace_propagator(n, t1, PARAMS).matrix
        u2 = subspace_propagator(n, t2, PARAMS).matrix
        u12 = subspace_propagator(n, t1 + t2, PARAMS).matrix
        np.testing.assert_allclose(u12, u1 @ u2, atol=1e-12)


class TestBlockPropagator:
    def test_dimension_counting(self):
        p = PhysicalParams(fock_cutoff=2)
        u = block_propagator(1e-5, p)
        assert [b.matrix.shape[0] for b in u.blocks] == [1, 2, 3]
        assert u.dim == 6
        assert u.excluded_subspaces == (3, 4)

    def test_identity_at_t0(self):
        u = block_propagator(0.0, PARAMS)
        np.testing.assert_allclose(u.matrix(), np.eye(u.dim), atol=1e-15)

    def test_labels_cover_excitations(self):
        u = block_propagator(1e-5, PARAMS)
        assert len(u.labels) == 3 * PARAMS.fock_cutoff
        excitations = [lab.total_excitation() for lab in u.labels]
        assert excitations == sorted(excitations)

    @pytest.mark.parametrize("t", [1e-7, 3.3e-5, 9.9e-4])
    def test_orthogonality(self, t):
        m = block_propagator(t, PARAMS).matrix()
        assert np.abs(m.T @ m - np.eye(m.shape[0])).max() <= 1e-12
