import math

import numpy as np
import pytest

from ionjcm import oracle
from ionjcm.closed_form import (
    case1_series,
    case2_series,
    distribution_series,
    evaluate_case1,
    limit_coherent_form,
    limit_squeezed_form,
    motional_case1,
    motional_case2,
    occupations_case1,
    occupations_case2,
)
from ionjcm.core import PhysicalParams
from ionjcm.states import CaseOneInit, CaseTwoInit, case_two_state, phonon_distribution

PARAMS = PhysicalParams(eta=0.1, omega_rabi=2 * math.pi * 5e5, fock_cutoff=25)
XI = PARAMS.xi


def beta_time(factor, value):
    """t such that factor * xi * t = value."""
    return value / (factor * XI)


class TestOccupationsCase1:
    def test_initial_state(self):
        dist = phonon_distribution("poisson", 3.0, PARAMS.fock_cutoff)
        occ = occupations_case1(dist, 0.0, PARAMS)
        assert occ.as_tuple() == (0.0, 0.0, pytest.approx(1.0, abs=1e-12))

    def test_number_state_pi_half(self):
        # single term of the middle series: n/(2n-1) = 1 and sin^2 = 1 at n = 1
        dist = phonon_distribution("number", 1, PARAMS.fock_cutoff)
        occ = occupations_case1(dist, beta_time(1.0, math.pi / 2.0), PARAMS)
        assert occ.p_up == pytest.approx(0.0, abs=1e-12)
        assert occ.p_mid == pytest.approx(1.0, abs=1e-12)
        assert occ.p_down == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("kind,mean", [
        ("poisson", 2.0), ("thermal", 1.5), ("number", 4), ("squeezed_vacuum", 2.0),
    ])
    def test_sum_with_deficit_is_one(self, kind, mean):
        dist = phonon_distribution(kind, mean, PARAMS.fock_cutoff)
        for t in (0.0, 7.7e-6, 1.3e-4, 5.5e-4):
            occ = occupations_case1(dist, t, PARAMS)
            assert occ.total() + dist.deficit == pytest.approx(1.0, abs=1e-10)


class TestOccupationsCase2:
    def test_initial_state(self):
        init = case_two_state(0.5, 0.5, math.sqrt(0.5), 0.3, -0.4)
        occ = occupations_case2(init, 0.0, PARAMS)
        assert occ.p_up == pytest.approx(0.25, abs=1e-14)
        assert occ.p_mid == pytest.approx(0.25, abs=1e-14)
        assert occ.p_down == pytest.approx(0.5, abs=1e-14)

    def test_pure_doubly_excited_at_cos_minus_one(self):
        init = case_two_state(1.0, 0.0, 0.0)
        occ = occupations_case2(init, beta_time(math.sqrt(3.0), math.pi), PARAMS)
        assert occ.p_up == pytest.approx(1.0 / 9.0, rel=1e-12)
        assert occ.p_mid == pytest.approx(0.0, abs=1e-24)
        assert occ.p_down == pytest.approx(8.0 / 9.0, rel=1e-12)

    def test_sum_identity_fig2_config(self):
        amp = 1.0 / math.sqrt(3.0)
        init = case_two_state(amp, amp, amp)
        for t in np.linspace(0.0, 6e-4, 10000):
            occ = occupations_case2(init, t, PARAMS)
            assert abs(occ.total() - 1.0) <= 1e-12


class TestMotionalCase1:
    def test_t0_is_coherent_projector(self):
        init = CaseOneInit(r=1.2, phi=0.7)
        rho = motional_case1(init, 0.0, PARAMS)
        q = init.amplitudes(PARAMS.fock_cutoff)
        np.testing.assert_allclose(rho.entries, np.outer(q, q.conj()), atol=1e-15)

    def test_vacuum_is_stationary(self):
        init = CaseOneInit(r=0.0, phi=0.0)
        for t in (1e-6, 3e-4):
            rho = motional_case1(init, t, PARAMS)
            assert rho.entries[0, 0].real == pytest.approx(1.0, abs=1e-14)
            assert np.abs(rho.entries).sum() == pytest.approx(1.0, abs=1e-14)

    def test_matches_oracle_partial_trace(self):
        rng = np.random.default_rng(11)
        for _ in range(8):
            init = CaseOneInit(r=math.sqrt(rng.uniform(0.1, 4.0)), phi=rng.uniform(-3, 3))
            t = rng.uniform(0.0, 6e-4)
            rho_cf = motional_case1(init, t, PARAMS)
            psi = oracle.evolve_vector(oracle.case1_vector(init, PARAMS), t, PARAMS)
            rho_num = oracle.partial_trace_internal(np.outer(psi, psi.conj()))
            np.testing.assert_allclose(rho_cf.entries, rho_num.entries, atol=1e-9)

    def test_trace_positivity_hermiticity(self):
        init = CaseOneInit(r=math.sqrt(2.5), phi=-1.2)
        for t in (2e-5, 1.9e-4, 4.8e-4):
            rho = motional_case1(init, t, PARAMS)
            assert rho.trace() + rho.deficit == pytest.approx(1.0, abs=1e-10)
            assert np.array_equal(rho.entries, rho.entries.conj().T)
            assert rho.smallest_eigenvalue() >= -1e-9

    def test_total_excitation_constant(self):
        init = CaseOneInit(r=math.sqrt(3.0), phi=0.0)
        ref = None
        for t in np.linspace(0.0, 5e-4, 40):
            point = evaluate_case1(init, t, PARAMS)
            n_vib = float(np.arange(PARAMS.dim) @ point.motional.diagonal())
            n_el = 2.0 * point.occupations.p_up + point.occupations.p_mid
            total = n_vib + n_el
            ref = total if ref is None else ref
            assert total == pytest.approx(ref, abs=1e-9)


class TestMotionalCase2:
    def test_t0_vacuum(self):
        init = case_two_state(0.28, 0.0, 0.96)
        rho = motional_case2(init, 0.0, PARAMS)
        assert rho.entries[0, 0].real == pytest.approx(1.0, abs=1e-12)
        assert np.abs(rho.entries[1:, 1:]).max() == pytest.approx(0.0, abs=1e-24)

    def test_support_is_seven_entries(self):
        init = case_two_state(0.5, 0.5, math.sqrt(0.5), 0.4, 1.1)
        rho = motional_case2(init, 3.3e-5, PARAMS).entries
        mask = np.zeros_like(rho, dtype=bool)
        mask[:3, :3] = True
        assert np.abs(rho[~mask]).max() == 0.0

    def test_paper_operating_point(self):
        # b = 0, c = 0.96 at cos(sqrt3 xi t) = -1: rho_22 = 8a^2/9,
        # rho_02 = 2 sqrt2 a c / 3
        c = 0.96
        a = math.sqrt(1.0 - c * c)
        init = case_two_state(a, 0.0, c)
        rho = motional_case2(init, beta_time(math.sqrt(3.0), math.pi), PARAMS).entries
        assert rho[2, 2].real == pytest.approx(8.0 * a * a / 9.0, rel=1e-12)
        assert rho[2, 2].real == pytest.approx(0.06968888888888, rel=1e-9)
        assert rho[0, 2].real == pytest.approx(2.0 * math.sqrt(2.0) * a * c / 3.0, rel=1e-12)
        assert rho[0, 2].real == pytest.approx(0.25342707037726, rel=1e-9)
        assert rho[0, 0].real == pytest.approx(1.0 - 8.0 * a * a / 9.0, rel=1e-12)

    def test_matches_oracle_partial_trace(self):
        rng = np.random.default_rng(12)
        for _ in range(8):
            w = rng.dirichlet((1.0, 1.0, 1.0))
            init = CaseTwoInit(
                a=math.sqrt(w[0]), b=math.sqrt(w[1]), c=math.sqrt(w[2]),
                phi1=rng.uniform(-3, 3), phi2=rng.uniform(-3, 3),
            )
            t = rng.uniform(0.0, 6e-4)
            rho_cf = motional_case2(init, t, PARAMS)
            psi = oracle.evolve_vector(oracle.case2_vector(init, PARAMS), t, PARAMS)
            rho_num = oracle.partial_trace_internal(np.outer(psi, psi.conj()))
            np.testing.assert_allclose(rho_cf.entries, rho_num.entries, atol=1e-9)


class TestWeakFieldLimits:
    def test_coherent_form_values(self):
        rho = limit_coherent_form(0.01, 0.0)
        assert rho.entries[0, 1].real == pytest.approx(0.1, rel=1e-14)
        assert rho.entries[0, 0].real == pytest.approx(0.99, rel=1e-14)
        vac = limit_coherent_form(0.0, 1.3)
        assert vac.entries[0, 0].real == 1.0
        with pytest.raises(ValueError):
            limit_coherent_form(1.0, 0.0)

    def test_squeezed_form_values(self):
        n_mean = 16.0 * 0.1 * 0.1 / 9.0
        rho = limit_squeezed_form(n_mean, 0.0)
        assert rho.entries[2, 2].real == pytest.approx(8.0 * 0.01 / 9.0, rel=1e-12)
        assert rho.entries[0, 2].real == pytest.approx(math.sqrt(n_mean / 2.0), rel=1e-12)
        vac = limit_squeezed_form(0.0, 0.0)
        assert vac.entries[0, 0].real == 1.0

    def test_case2_approaches_coherent_form(self):
        b = 0.01
        init = case_two_state(0.0, b, math.sqrt(1.0 - b * b), 0.3, 1.0)
        t = beta_time(1.0, 0.9)  # sin(xi t) > 0
        rho = motional_case2(init, t, PARAMS)
        n_mean = b * b * math.sin(XI * t) ** 2
        ref = limit_coherent_form(n_mean, init.phi2 - init.phi1, dim=PARAMS.dim)
        assert np.abs(rho.entries - ref.entries).max() <= 1e-5

    def test_case2_approaches_squeezed_form(self):
        a = 0.1
        init = case_two_state(a, 0.0, math.sqrt(1.0 - a * a), 0.0, 0.7)
        t = beta_time(math.sqrt(3.0), math.pi)  # cos(sqrt3 xi t) = -1
        rho = motional_case2(init, t, PARAMS)
        ref = limit_squeezed_form(16.0 * a * a / 9.0, init.phi2, dim=PARAMS.dim)
        assert np.abs(rho.entries - ref.entries).max() <= 1e-3


class TestSeries:
    def test_case1_series_matches_pointwise(self):
        init = CaseOneInit(r=math.sqrt(1.7), phi=0.6)
        ts = np.array([0.0, 3.1e-5, 2.2e-4, 5.9e-4])
        series = case1_series(init, ts, PARAMS)
        for k, t in enumerate(ts):
            rho = motional_case1(init, t, PARAMS).entries
            ls = np.arange(PARAMS.dim)
            n_mean = float(ls @ rho.diagonal().real)
            s1 = (np.sqrt(ls[:-1] + 1.0) * rho.diagonal(1)).sum()
            s2 = (np.sqrt((ls[:-2] + 1.0) * (ls[:-2] + 2.0)) * rho.diagonal(2)).sum()
            assert series.n_mean[k] == pytest.approx(n_mean, abs=1e-12)
            assert series.s1[k] == pytest.approx(s1, abs=1e-12)
            assert series.s2[k] == pytest.approx(s2, abs=1e-12)
            occ = occupations_case1(init.distribution(PARAMS.fock_cutoff), t, PARAMS)
            assert series.occ_up[k] == pytest.approx(occ.p_up, abs=1e-12)
            assert series.occ_down[k] == pytest.approx(occ.p_down, abs=1e-12)

    def test_case2_series_matches_pointwise(self):
        init = case_two_state(0.4, 0.3, math.sqrt(1 - 0.16 - 0.09), -0.2, 2.0)
        ts = np.array([1e-6, 8.8e-5, 4.4e-4])
        series = case2_series(init, ts, PARAMS)
        for k, t in enumerate(ts):
            rho = motional_case2(init, t, PARAMS).entries
            assert series.n_mean[k] == pytest.approx(
                float(np.arange(PARAMS.dim) @ rho.diagonal().real), abs=1e-13
            )
            occ = occupations_case2(init, t, PARAMS)
            assert series.occ_mid[k] == pytest.approx(occ.p_mid, abs=1e-13)

    def test_distribution_series_conserves_excitation(self):
        dist = phonon_distribution("thermal", 2.0, PARAMS.fock_cutoff)
        ts = np.linspace(0.0, 4e-4, 50)
        series = distribution_series(dist, ts, PARAMS)
        total = series.n_mean + 2.0 * series.occ_up + series.occ_mid
        np.testing.assert_allclose(total, dist.mean(), atol=1e-10)
        assert np.all(series.s1 == 0.0)

    def test_gamma_undefined_without_phonons(self):
        init = CaseOneInit(r=math.sqrt(0.5), phi=0.0)
        series = case1_series(init, np.array([0.0, 1e-5]), PARAMS)
        gam = series.gamma()
        assert math.isnan(gam[0]) is False  # coherent state at t=0 has n_mean > 0
        vac = case1_series(CaseOneInit(r=0.0, phi=0.0), np.array([0.0, 1e-5]), PARAMS)
        assert np.all(np.isnan(vac.gamma()))
