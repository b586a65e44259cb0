import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mdpsk_div.fading import (BranchStatistics, DopplerModel, LagCovariance, branch_statistics,
                              correlation_coefficient, covariance_matrix, sample_fading_pair,
                              symbol_covariance)
from mdpsk_div.specfun import bessel_j0

from _oracles import i0_series_mp

PAPER_RHO = {0.03: 0.9871 + 0.1519j, 0.05: 0.9642 + 0.2511j}


def _rho_by_series(kappa, fd_T, tau):
    # same model, argument assembled as a square root and fed to the 50-digit series
    x = 2 * math.pi * fd_T * tau
    arg = cmath.sqrt(kappa ** 2 - x ** 2 + 4j * math.pi * kappa * fd_T * tau)
    return i0_series_mp(arg) / i0_series_mp(kappa)


class TestDopplerModel:
    @pytest.mark.parametrize("kappa,fd", [(-1, 0.03), (3, -0.1), (float("nan"), 0.03), (3, float("inf"))])
    def test_rejects_bad_parameters(self, kappa, fd):
        with pytest.raises(ValueError):
            DopplerModel(kappa, fd)


class TestCorrelationCoefficient:
    def test_zero_lag(self):
        for m in (DopplerModel(0, 0.1), DopplerModel(3, 0.03), DopplerModel(10, 0.2)):
            assert correlation_coefficient(m, 0.0) == pytest.approx(1 + 0j, abs=1e-15)

    @pytest.mark.parametrize("fd", [0.03, 0.05])
    def test_published_values(self, fd):
        rho = correlation_coefficient(DopplerModel(3.0, fd), 1.0)
        assert abs(rho.real - PAPER_RHO[fd].real) <= 1e-3
        assert abs(rho.imag - PAPER_RHO[fd].imag) <= 1e-3

    @pytest.mark.parametrize("kappa,fd,tau", [(3, 0.03, 1), (3, 0.05, 1), (1.5, 0.1, 2.5), (8, 0.2, 0.7)])
    def test_matches_series_oracle(self, kappa, fd, tau):
        got = correlation_coefficient(DopplerModel(kappa, fd), tau)
        assert abs(got - _rho_by_series(kappa, fd, tau)) < 1e-12

    @pytest.mark.parametrize("fd", [0.01, 0.03, 0.1, 0.3])
    def test_isotropic_limit_is_j0(self, fd):
        rho = correlation_coefficient(DopplerModel(0.0, fd), 1.0)
        assert rho.imag == 0.0
        assert rho.real == pytest.approx(bessel_j0(2 * math.pi * fd), abs=1e-12)

    def test_hermitian_in_lag(self):
        m = DopplerModel(3.0, 0.05)
        assert correlation_coefficient(m, -1.3) == pytest.approx(correlation_coefficient(m, 1.3).conjugate(), abs=1e-14)

    def test_vectorised(self):
        m = DopplerModel(3.0, 0.03)
        taus = np.array([0.0, 0.5, 1.0])
        out = correlation_coefficient(m, taus)
        assert out.shape == (3,)
        assert out[2] == pytest.approx(correlation_coefficient(m, 1.0), abs=1e-15)

    def test_magnitude_bounded_on_grid(self):
        for kappa in np.linspace(0, 10, 11):
            m = DopplerModel(kappa, 0.05)
            vals = correlation_coefficient(m, np.linspace(0, 4, 41))
            assert np.all(np.abs(vals) <= 1 + 1e-12)

    @settings(max_examples=60)
    @given(st.floats(0, 10), st.floats(0, 0.4), st.floats(0, 3))
    def test_magnitude_bounded(self, kappa, fd, tau):
        assert abs(correlation_coefficient(DopplerModel(kappa, fd), tau)) <= 1 + 1e-12


class TestSymbolCovariance:
    def test_static_channel(self):
        m = DopplerModel(3.0, 0.0)
        for lag in (0, 1, 5):
            cov = symbol_covariance(m, lag)
            assert cov.c_l == pytest.approx(cov.c0, rel=1e-14)
            assert cov.d_l == 0.0

    def test_zero_lag(self):
        cov = symbol_covariance(DopplerModel(3.0, 0.05), 0)
        assert cov.d_l == 0.0 and cov.c0 > 0

    def test_close_to_direct_value(self):
        m = DopplerModel(3.0, 0.03)
        rho = symbol_covariance(m, 1).rho
        direct = correlation_coefficient(m, 1.0)
        assert abs(rho.real - direct.real) < 5e-3
        assert abs(rho.imag - direct.imag) < 5e-3

    def test_quadrature_converged(self):
        m = DopplerModel(3.0, 0.05)
        a = symbol_covariance(m, 1, quad_points=32).rho
        b = symbol_covariance(m, 1, quad_points=96).rho
        assert abs(a - b) < 1e-13

    @pytest.mark.parametrize("kw", [{"lag": -1}, {"lag": 1.5}, {"lag": 1, "quad_points": 4},
                                    {"lag": 1, "c0_continuous": 0.0}])
    def test_validation(self, kw):
        with pytest.raises(ValueError):
            symbol_covariance(DopplerModel(3.0, 0.03), **kw)


def _min_eig_power_iteration(a, iters=3000):
    # shift so the smallest eigenvalue of a becomes the dominant one of s*I - a
    s = np.abs(a).sum(axis=1).max()
    b = s * np.eye(len(a)) - a
    v = np.random.default_rng(0).standard_normal(len(a))
    for _ in range(iters):
        v = b @ v
        v /= np.linalg.norm(v)
    return s - v @ b @ v


class TestCovarianceMatrix:
    def test_identity(self):
        assert np.array_equal(covariance_matrix(LagCovariance(1.0, 0.0, 0.0)), np.eye(4))

    def test_sign_pattern(self):
        k = covariance_matrix(LagCovariance(1.0, 0.9, 0.1))
        assert k[0, 3] == 0.1
        assert k[1, 2] == -0.1

    @pytest.mark.parametrize("kappa,fd", [(0, 0.05), (3, 0.03), (3, 0.05), (6, 0.2), (3, 0.0)])
    def test_symmetric_psd(self, kappa, fd):
        k = covariance_matrix(symbol_covariance(DopplerModel(kappa, fd), 1))
        assert np.array_equal(k, k.T)
        assert _min_eig_power_iteration(k) >= -1e-12

    def test_rejects_invalid(self):
        with pytest.raises(ValueError):
            LagCovariance(1.0, 0.9, 0.5)


class TestSampler:
    def test_fully_correlated(self):
        s = BranchStatistics.from_rho(1.0, 10.0)
        prev, cur = sample_fading_pair(s, 0.5, np.random.default_rng(0), 1000)
        assert np.array_equal(prev, cur)

    def test_uncorrelated(self):
        s = BranchStatistics.from_rho(0.0, 10.0)
        prev, cur = sample_fading_pair(s, 0.5, np.random.default_rng(1), 10 ** 6)
        corr = np.mean(cur * np.conj(prev)) / np.mean(np.abs(prev) ** 2)
        assert abs(corr) < 5e-3

    def test_lag_moment(self):
        rho, c0, n = PAPER_RHO[0.03], 0.5, 10 ** 6
        s = BranchStatistics.from_rho(rho, 10.0)
        prev, cur = sample_fading_pair(s, c0, np.random.default_rng(2), n)
        prod = cur * np.conj(prev) / (2 * c0)
        m = prod.mean()
        assert abs(m.real - rho.real) <= 3 * prod.real.std() / math.sqrt(n)
        assert abs(m.imag - rho.imag) <= 3 * prod.imag.std() / math.sqrt(n)
        for x in (prev, cur):
            p = np.abs(x) ** 2
            assert abs(p.mean() - 2 * c0) <= 4 * p.std() / math.sqrt(n)

    def test_scalar_draw(self):
        a, b = sample_fading_pair(BranchStatistics.from_rho(0.5j, 1.0), 1.0, np.random.default_rng(3))
        assert isinstance(a, complex) and isinstance(b, complex)

    def test_rejects_nonpositive_power(self):
        with pytest.raises(ValueError):
            sample_fading_pair(BranchStatistics.from_rho(0.5, 1.0), 0.0, np.random.default_rng(0))


class TestBranchStatistics:
    def test_static(self):
        s = branch_statistics(DopplerModel(3.0, 0.0), 1.0, 1.0)
        assert s.rho_mag == pytest.approx(1.0, abs=1e-15) and s.rho_phase == 0.0

    def test_snr(self):
        s = branch_statistics(DopplerModel(3.0, 0.03), 1.0, 0.1, c0=0.5)
        assert s.snr == pytest.approx(10.0, rel=1e-15)
        assert s.fading_power == pytest.approx(0.5, rel=1e-15)

    def test_published_polar_form(self):
        s = branch_statistics(DopplerModel(3.0, 0.03), 1.0, 1.0)
        assert s.rho_mag == pytest.approx(0.9987, abs=1e-3)
        assert s.rho_phase == pytest.approx(0.1526, abs=1e-3)

    def test_integrated_mode_close(self):
        m = DopplerModel(3.0, 0.05)
        a = branch_statistics(m, 1.0, 1.0, mode="direct").rho
        b = branch_statistics(m, 1.0, 1.0, mode="integrated").rho
        assert 0 < abs(a - b) < 5e-3

    def test_bad_mode(self):
        with pytest.raises(ValueError):
            branch_statistics(DopplerModel(3.0, 0.05), 1.0, 1.0, mode="sampled")

    def test_phase_normalised(self):
        s = BranchStatistics.from_rho(-1 + 0j, 2.0)
        assert s.rho_phase == math.pi
        with pytest.raises(ValueError):
            BranchStatistics(1.0, 1.0, 1.0, -math.pi)

    def test_snr_per_bit(self):
        assert BranchStatistics.from_rho(1.0, 30.0).snr_per_bit(8) == pytest.approx(10.0)
