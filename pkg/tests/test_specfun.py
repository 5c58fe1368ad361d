import math

import mpmath as mp
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from besselcall import specfun
from besselcall.errors import BesselOverflowError, DomainError

mp.mp.dps = 40


def phi_oracle(a):
    a = mp.mpf(a)
    integrand = lambda y: (1 - mp.exp(-y * y / 2)) / (y * y) if y != 0 else mp.mpf("0.5")
    return float(mp.sqrt(2 / mp.pi) * mp.quad(integrand, [0, a]))


class TestGamma:
    @pytest.mark.parametrize("x, want", [(1.0, 0.0), (2.0, 0.0), (0.5, 0.5723649429247001)])
    def test_log_gamma_examples(self, x, want):
        assert specfun.log_gamma(x) == pytest.approx(want, abs=1e-13)

    @pytest.mark.parametrize("x", [0.0, -1.0, float("nan")])
    def test_log_gamma_domain(self, x):
        with pytest.raises(DomainError):
            specfun.log_gamma(x)

    def test_reg_lower_examples(self):
        assert specfun.reg_lower_gamma(1.0, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)
        assert specfun.reg_lower_gamma(0.5, 0.5) == pytest.approx(0.6826894921370859, abs=1e-12)
        assert specfun.reg_lower_gamma(2.0, 0.0) == 0.0

    @pytest.mark.parametrize("nu, x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.1)])
    def test_reg_lower_domain(self, nu, x):
        with pytest.raises(DomainError):
            specfun.reg_lower_gamma(nu, x)

    @given(st.floats(0.05, 60.0), st.floats(0.0, 300.0))
    def test_reg_lower_matches_scipy(self, nu, x):
        assert specfun.reg_lower_gamma(nu, x) == pytest.approx(sc.gammainc(nu, x), abs=1e-12)

    @given(st.floats(0.05, 60.0), st.floats(0.0, 300.0))
    def test_upper_complements_lower(self, nu, x):
        p, q = specfun.reg_lower_gamma(nu, x), specfun.reg_upper_gamma(nu, x)
        assert p + q == pytest.approx(1.0, abs=1e-13)
        assert q == pytest.approx(sc.gammaincc(nu, x), rel=1e-10, abs=1e-300)

    def test_upper_tiny_tail(self):
        # 1 - P is not representable here, Q still is
        assert specfun.reg_upper_gamma(1.5, 500.0) == pytest.approx(float(mp.gammainc(1.5, 500, mp.inf, regularized=True)), rel=1e-11)

    @given(st.floats(0.1, 20.0), st.floats(0.0, 50.0), st.floats(0.0, 50.0))
    def test_reg_lower_monotone(self, nu, a, b):
        lo, hi = sorted((a, b))
        assert specfun.reg_lower_gamma(nu, lo) <= specfun.reg_lower_gamma(nu, hi)


class TestNormalFamily:
    def test_n_tilde_examples(self):
        assert specfun.n_tilde(0.0) == 0.0
        assert specfun.n_tilde(1.0) == pytest.approx(0.6826894921370859, abs=1e-13)
        assert specfun.n_tilde(-1.0) == pytest.approx(-0.6826894921370859, abs=1e-13)
        assert specfun.n_tilde(40.0) == 1.0

    @given(st.floats(-30.0, 30.0))
    def test_n_tilde_odd_and_erf(self, a):
        assert specfun.n_tilde(-a) == -specfun.n_tilde(a)
        assert specfun.n_tilde(a) == pytest.approx(math.erf(a / math.sqrt(2.0)), abs=1e-13)

    def test_phi_examples(self):
        assert specfun.phi(0.0) == 0.0
        assert specfun.phi(1e8) == pytest.approx(1.0, abs=1e-8)
        # direct quadrature of the defining integral
        assert specfun.phi(1.0) == pytest.approx(phi_oracle(1.0), abs=1e-13)
        assert specfun.phi(1.0) == pytest.approx(0.36874638, abs=1e-8)

    @pytest.mark.parametrize("a", [1e-6, 0.01, 0.3, 2.0, 7.5, 25.0])
    def test_phi_quadrature_oracle(self, a):
        assert specfun.phi(a) == pytest.approx(phi_oracle(a), abs=1e-13)
        assert specfun.phi(-a) == -specfun.phi(a)

    @given(st.floats(1e-3, 50.0))
    def test_phi_closed_identity(self, a):
        # integrate by parts: phi = N~(a) - sqrt(2/pi) (1 - e^{-a^2/2}) / a
        rhs = specfun.n_tilde(a) - math.sqrt(2 / math.pi) * (-math.expm1(-a * a / 2)) / a
        assert specfun.phi(a) == pytest.approx(rhs, abs=1e-13)


class TestBessel:
    def test_examples(self):
        assert specfun.bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-13)
        assert specfun.bessel_i(1.5, 0.0) == 0.0
        # e^-y I_1/2(y) = sqrt(1 / (2 pi y)) (1 - e^-2y)
        want = math.sqrt(1 / (2 * math.pi * 700)) * (1 - math.exp(-1400))
        assert specfun.bessel_i(0.5, 700.0, scaled=True) == pytest.approx(want, rel=1e-12)
        assert specfun.bessel_i(0.5, 700.0, scaled=True) == pytest.approx(float(mp.besseli(0.5, 700) * mp.exp(-700)), rel=1e-12)

    def test_tail_examples(self):
        assert specfun.bessel_i_tail(0.5, 0.0) == 0.0
        want = math.sqrt(2 / math.pi) * math.sinh(1.0) - math.sqrt(0.5) / math.gamma(1.5)
        assert specfun.bessel_i_tail(0.5, 1.0) == pytest.approx(want, rel=1e-13)
        assert want == pytest.approx(0.1397902, abs=2e-7)  # difference of two 7-digit roundings

    @pytest.mark.parametrize("nu", [0.5, 1.0, 2.5, 7.0])
    def test_tail_small_y_law(self, nu):
        y = 1e-4
        lead = 1 / (2 ** (nu + 2) * math.gamma(nu + 2))
        assert specfun.bessel_i_tail(nu, y) / y ** (nu + 2) == pytest.approx(lead, rel=1e-7)

    def test_k_examples(self):
        assert specfun.bessel_k(0.5, 1.0) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-13)
        assert specfun.bessel_k(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2), rel=1e-13)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 1.5, 3.0])
    def test_k_small_y_law(self, nu):
        y = 1e-7
        assert specfun.bessel_k(nu, y) * y ** nu == pytest.approx(2 ** (nu - 1) * math.gamma(nu), rel=1e-5)

    @given(st.floats(0.05, 30.0), st.one_of(st.just(0.0), st.floats(1e-200, 600.0)))
    def test_i_matches_scipy(self, nu, y):
        assert specfun.bessel_i(nu, y, scaled=True) == pytest.approx(sc.ive(nu, y), rel=1e-12, abs=1e-300)

    def test_i_subnormal_argument(self):
        # scipy flushes this to zero, the power term is still representable
        y = 2.2250738585e-313
        assert specfun.bessel_i(0.5, y) == pytest.approx(float(mp.besseli(0.5, mp.mpf(y))), rel=1e-12)

    @given(st.floats(0.05, 30.0), st.floats(1e-3, 600.0))
    def test_k_matches_scipy(self, nu, y):
        assert specfun.bessel_k(nu, y, scaled=True) == pytest.approx(sc.kve(nu, y), rel=1e-11)

    @pytest.mark.parametrize("nu, y", [(0.5, 1e-3), (1.5, 0.7), (3.0, 12.0), (0.5, 200.0), (6.5, 450.0)])
    def test_tail_mpmath(self, nu, y):
        ref = mp.besseli(nu, y) - (mp.mpf(y) / 2) ** nu / mp.gamma(1 + nu)
        assert specfun.bessel_i_tail(nu, y) == pytest.approx(float(ref), rel=1e-12)

    @given(st.floats(0.1, 10.0), st.floats(0.05, 80.0))
    def test_wronskian(self, nu, y):
        # I_nu K_{nu+1} + I_{nu+1} K_nu = 1/y, scaled factors cancel
        lhs = specfun.bessel_i(nu, y, True) * specfun.bessel_k(nu + 1, y, True) + specfun.bessel_i(
            nu + 1, y, True
        ) * specfun.bessel_k(nu, y, True)
        assert lhs * y == pytest.approx(1.0, rel=1e-12)

    def test_overflow_and_domain(self):
        with pytest.raises(BesselOverflowError):
            specfun.bessel_i(1.0, 800.0)
        with pytest.raises(DomainError):
            specfun.bessel_k(1.0, 0.0)
        with pytest.raises(DomainError):
            specfun.bessel_i(0.0, 1.0)
        with pytest.raises(DomainError):
            specfun.bessel_i(1.0, -1.0)

    def test_series_spec_validation(self):
        with pytest.raises(DomainError):
            specfun.SeriesSpec(term_rel_tol=1e-3)
        with pytest.raises(DomainError):
            specfun.SeriesSpec(max_terms=10)
