import math

import mpmath as mp
import pytest
import scipy.integrate as si
from hypothesis import given
from hypothesis import strategies as st

import oracles
from besselcall import analytic as A
from besselcall import quad
from besselcall.analytic import make_params
from besselcall.errors import DomainError, QuadratureError
from besselcall.quad import QuadratureSpec, integrate_adaptive, integrate_tail

ALG = QuadratureSpec(tail_policy="algebraic", tail_exponent=2.0, abs_tol=1e-12, rel_tol=1e-12)


class TestSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(abs_tol=0.0), dict(rel_tol=0.1), dict(max_subdivisions=8), dict(tail_policy="linear"),
         dict(tail_policy="algebraic", tail_exponent=1.0)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            QuadratureSpec(**kwargs)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(quad.TOL_ENV, "1e-7")
        assert QuadratureSpec.from_env().abs_tol == 1e-7
        assert QuadratureSpec.from_env(abs_tol=1e-9).abs_tol == 1e-9
        monkeypatch.delenv(quad.TOL_ENV)
        assert QuadratureSpec.from_env() == QuadratureSpec()

    def test_tightened(self):
        q = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-8).tightened(10)
        assert q.abs_tol == pytest.approx(1e-9) and q.rel_tol == pytest.approx(1e-9)


class TestAdaptive:
    def test_examples(self):
        assert integrate_adaptive(lambda x: x, 0, 1).value == pytest.approx(0.5, abs=1e-15)
        assert integrate_adaptive(lambda y: y ** -0.5, 0, 1, QuadratureSpec(abs_tol=1e-10)).value == pytest.approx(2.0, abs=1e-9)
        assert integrate_adaptive(math.sin, 0, math.pi).value == pytest.approx(2.0, abs=1e-14)

    @given(st.floats(-5, 5), st.floats(0.01, 10), st.integers(0, 6))
    def test_polynomials_vs_exact(self, a, width, deg):
        b = a + width
        exact = (b ** (deg + 1) - a ** (deg + 1)) / (deg + 1)
        r = integrate_adaptive(lambda x: x ** deg, a, b)
        assert r.converged and r.value == pytest.approx(exact, rel=1e-12, abs=1e-12)

    @pytest.mark.parametrize("f, a, b", [(lambda x: math.exp(-x * x), -3, 2), (lambda x: math.log(x), 1e-9, 3),
                                         (lambda x: 1 / (1 + 100 * x * x), -1, 1)])
    def test_vs_scipy(self, f, a, b):
        ref, _ = si.quad(f, a, b, epsabs=1e-14, epsrel=1e-13, limit=500)
        r = integrate_adaptive(f, a, b)
        assert r.value == pytest.approx(ref, rel=1e-10, abs=1e-13)
        assert r.err_est >= 0 and r.evaluations > 0

    def test_refinement_within_error(self):
        q = QuadratureSpec(abs_tol=1e-8, rel_tol=1e-8)
        f = lambda x: math.sqrt(x) * math.cos(7 * x)
        r1 = integrate_adaptive(f, 0, 3, q)
        r2 = integrate_adaptive(f, 0, 3, q.tightened(10))
        assert abs(r1.value - r2.value) <= r1.err_est

    def test_flags_nonconvergence(self):
        q = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-15, max_subdivisions=16)
        r = integrate_adaptive(lambda x: math.sin(1 / x), 1e-6, 1, q)
        assert not r.converged and math.isfinite(r.value)

    def test_domain(self):
        with pytest.raises(DomainError):
            integrate_adaptive(math.sin, 1, 0)
        with pytest.raises(DomainError):
            integrate_adaptive(math.sin, 0, math.inf)


class TestTail:
    def test_examples(self):
        assert integrate_tail(lambda s: math.exp(-s), 1.0).value == pytest.approx(math.exp(-1), rel=1e-13)
        assert integrate_tail(lambda s: s ** -2, 1.0, ALG).value == pytest.approx(1.0, abs=1e-10)

    def test_algebraic_other_power(self):
        q = QuadratureSpec(tail_policy="algebraic", tail_exponent=1.5, abs_tol=1e-12, rel_tol=1e-12)
        assert integrate_tail(lambda s: (1 + s) ** -1.5, 0.0, q).value == pytest.approx(2.0, rel=1e-8)

    def test_last_passage_identity(self):
        # nu * int_1^inf (p_s(0,1) - p_s(0.5,1)) ds = price via last passage, delta = 3, K = 2
        nu = 0.5
        q = QuadratureSpec(tail_policy="algebraic", tail_exponent=nu + 1, abs_tol=1e-13, rel_tol=1e-12)
        f = lambda s: nu * (A.transition_density(3, s, 0, 1) - A.transition_density(3, s, 0.5, 1))
        v = integrate_tail(f, 1.0, q).value
        p = make_params(3, 2)
        assert v == pytest.approx(A.price_via_last_passage(p, 1.0), abs=1e-9)
        assert v == pytest.approx(A.price_bes3_closed(p, 1.0), abs=1e-9)


class TestOracles:
    @pytest.mark.parametrize("delta, K", [(3, 1), (5, 2), (3, 2), (7, 1), (5, 1)])
    def test_normalization_k_le_1(self, delta, K):
        assert quad.density_normalization(make_params(delta, K)) == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("delta, K", [(3, 0.5), (5, 0.5), (7, 0.5)])
    def test_normalization_matches_exact_mass(self, delta, K):
        p = make_params(delta, K)
        assert quad.density_normalization(p) == pytest.approx(A.normalization_constant(p) * A.price_total_mass(p), abs=1e-9)

    def test_normalization_delta3_half_strike_mpmath(self):
        # independent: 3 K^2 int_0^inf r dt with the elementary price, K = 0.5
        p = make_params(3, 0.5)
        head = mp.quad(lambda t: oracles.bes3_closed(0.5, t), [0, 0.1, 1, 10, 100, 1e4, 1e6])
        ref = 3 * 0.25 * (head + A.tail_constant(p) / (0.5 * 1e6 ** 0.5))
        assert float(ref) == pytest.approx(0.875, abs=1e-6)
        assert quad.density_normalization(make_params(3, 0.5)) == pytest.approx(float(ref), abs=1e-6)

    def test_laplace_examples(self):
        p = make_params(3, 1)
        assert quad.laplace_numeric(p, 0.5) == pytest.approx(6 * math.exp(-1) * (math.sinh(1) - 1), abs=1e-6)
        # infinite mean at delta = 3: the transform sits sqrt(2 lam) below 1
        assert 1 - quad.laplace_numeric(p, 1e-8) == pytest.approx(math.sqrt(2e-8), rel=1e-3)
        assert quad.laplace_numeric(make_params(5, 1), 1e-8) == pytest.approx(1.0, abs=1e-4)
        p5 = make_params(5, 1)
        assert quad.laplace_numeric(p5, 1.0) == pytest.approx(A.laplace_lambda_closed(p5, 1.0), abs=1e-6)

    @pytest.mark.parametrize("delta", [3.0, 5.0, 7.0])
    @pytest.mark.parametrize("K", [1.0, 2.0])
    @pytest.mark.parametrize("lam", [0.1, 1.0, 10.0])
    def test_laplace_vs_closed(self, delta, K, lam):
        p = make_params(delta, K)
        assert quad.laplace_numeric(p, lam) == pytest.approx(A.laplace_lambda_closed(p, lam), abs=1e-6)

    def test_density_cdf(self):
        p = make_params(3, 1)
        edges = [0.0, 0.1, 1.0, 10.0, math.inf]
        cdf = quad.density_cdf(p, edges)
        assert cdf[0] == 0.0 and cdf[-1] == pytest.approx(1.0, abs=1e-8)
        ref = 3 * mp.quad(lambda t: oracles.bes3_closed(1, t), [0, 0.1, 1])
        assert cdf[2] == pytest.approx(float(ref), abs=1e-9)
        with pytest.raises(DomainError):
            quad.density_cdf(p, [1.0, 0.5])

    def test_finite_mean_delta6(self):
        p = make_params(6, 1)
        m1 = quad.truncated_mean(p, 1e5).value
        m2 = quad.truncated_mean(p, 1e6).value
        assert abs(m2 - m1) < 1e-3 * m2
        h = 1e-4
        deriv = (A.laplace_lambda_closed(p, 2 * h) - A.laplace_lambda_closed(p, h * 1e-3)) / (2 * h - h * 1e-3)
        # central difference at 1e-4 with a half-width of 1e-4 as well
        central = (A.laplace_lambda_closed(p, 2e-4) - A.laplace_lambda_closed(p, 1e-12)) / (2e-4 - 1e-12)
        assert -central == pytest.approx(m2, rel=1e-3)
        assert -deriv == pytest.approx(m2, rel=1e-3)

    def test_infinite_mean_delta3(self):
        p = make_params(3, 1)
        ms = [quad.truncated_mean(p, T).value for T in (1e2, 1e3, 1e4)]
        assert ms[0] < ms[1] < ms[2]
        # grows like T^(1/2)
        assert ms[2] / ms[1] == pytest.approx(math.sqrt(10), rel=0.1)

    def test_domain(self):
        with pytest.raises(DomainError):
            quad.density_normalization(make_params(3, 0))
        with pytest.raises(DomainError):
            quad.laplace_numeric(make_params(3, 1), -1.0)

    def test_error_carries_result(self):
        err = QuadratureError("x", 1.5)
        assert err.result == 1.5
