import math

import numpy as np
import pytest
import scipy.stats as ss

from besselcall import analytic as A
from besselcall import mc, quad
from besselcall.analytic import ModelParams, make_params
from besselcall.errors import DomainError
from besselcall.mc import MCConfig


def rng(seed=7):
    return np.random.Generator(np.random.Philox(seed))


class TestConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [dict(n_samples=1000), dict(n_samples=10_001, n_streams=8), dict(path_step=0.0), dict(seed=-1),
         dict(seed=2 ** 64), dict(workers=0), dict(n_streams=0)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            MCConfig(**kwargs)

    def test_per_stream(self):
        assert MCConfig(n_samples=80_000, n_streams=8).per_stream == 10_000

    def test_streams_independent_and_reproducible(self):
        a = [g.random(4) for g in mc.make_streams(5, 3)]
        b = [g.random(4) for g in mc.make_streams(5, 3)]
        assert all(np.array_equal(x, y) for x, y in zip(a, b))
        assert not np.array_equal(a[0], a[1])


class TestEndpoint:
    def test_moment_example(self):
        est = mc.estimate_endpoint_moment(3, 1, 2, MCConfig(n_samples=1_000_000, seed=1))
        assert abs(est.z_score(7.0)) <= 3

    @pytest.mark.parametrize("delta, x0, t", [(3, 0, 1), (5, 1, 0.5), (4, 2, 1), (7, 0.5, 3), (3.5, 1, 1), (9.2, 0.1, 0.2)])
    def test_moment_identity(self, delta, x0, t):
        est = mc.estimate_endpoint_moment(delta, x0, t, MCConfig(n_samples=200_000, seed=3))
        assert abs(est.z_score(x0 * x0 + delta * t)) <= 3

    def test_central_chi_square(self):
        r = mc.sample_bessel_endpoint(3, 0, 1.0, rng(), 200_000)
        assert ss.kstest(r ** 2, ss.chi2(3).cdf).statistic < 1.63 / math.sqrt(r.size)

    def test_cdf_vs_transition_density(self):
        n = 100_000
        r = np.sort(mc.sample_bessel_endpoint(5, 0, 1.0, rng(11), n))
        ys = np.quantile(r, np.linspace(0.02, 0.98, 25))
        cdf = [quad.integrate_adaptive(lambda u: A.transition_density(5, 1.0, 0.0, u), 1e-12, y).value for y in ys]
        emp = np.searchsorted(r, ys, side="right") / n
        assert np.max(np.abs(emp - np.array(cdf))) < 1.63 / math.sqrt(n)

    @pytest.mark.parametrize("delta, x0, t", [(3.3, 1.0, 0.7), (6, 2.0, 1.5)])
    def test_noncentral_scipy(self, delta, x0, t):
        r = mc.sample_bessel_endpoint(delta, x0, t, rng(2), 100_000)
        law = ss.ncx2(delta, x0 * x0 / t)
        assert ss.kstest(r * r / t, law.cdf).statistic < 1.63 / math.sqrt(r.size)

    def test_domain(self):
        with pytest.raises(DomainError):
            mc.sample_bessel_endpoint(2, 1, 1, rng())
        with pytest.raises(DomainError):
            mc.sample_bessel_endpoint(3, -1, 1, rng())


class TestPrice:
    def test_bes3_example(self):
        p = make_params(3, 1)
        est = mc.estimate_price_mc(p, 1.0, MCConfig(n_samples=1_000_000, seed=42))
        assert abs(est.mean - A.price_bes3_closed(p, 1.0)) <= 3 * est.std_err

    def test_delta5_example(self):
        p = make_params(5, 0.5)
        est = mc.estimate_price_mc(p, 2.0, MCConfig(n_samples=400_000, seed=42))
        assert abs(est.mean - A.price_general_integral(p, 2.0)) <= 3 * est.std_err

    def test_huge_strike_is_zero(self):
        est = mc.estimate_price_mc(make_params(3, 1e6), 1.0, MCConfig(n_samples=100_000))
        assert est.mean == 0.0 and est.std_err == 0.0

    def test_defensive_mixture_unbiased(self):
        # the mixture only reweights, so both estimators target the same value
        p = make_params(3, 2)
        cfg = MCConfig(n_samples=400_000, seed=9)
        plain = mc.estimate_price_mc(p, 0.5, cfg, mix=0.0)
        mixed = mc.estimate_price_mc(p, 0.5, cfg, mix=0.3)
        ref = A.price(p, 0.5)
        assert abs(plain.z_score(ref)) <= 3 and abs(mixed.z_score(ref)) <= 3

    def test_zero_strike_warns(self):
        with pytest.warns(RuntimeWarning):
            mc.estimate_price_mc(make_params(3, 0), 1.0, MCConfig(n_samples=10_000), mix=0.0)

    def test_zero_strike_matches_k0(self):
        est = mc.estimate_price_mc(make_params(5, 0), 1.0, MCConfig(n_samples=400_000, seed=4))
        assert abs(est.z_score(A.price_k0(5, 1.0))) <= 3

    def test_determinism_across_workers(self):
        p = make_params(5, 1)
        a = mc.estimate_price_mc(p, 1.0, MCConfig(n_samples=80_000, seed=1, workers=1))
        b = mc.estimate_price_mc(p, 1.0, MCConfig(n_samples=80_000, seed=1, workers=4))
        c = mc.estimate_price_mc(p, 1.0, MCConfig(n_samples=80_000, seed=1, workers=1))
        assert a == b == c

    def test_domain(self):
        with pytest.raises(DomainError):
            mc.estimate_price_mc(make_params(3, 1), 0.0, MCConfig())
        with pytest.raises(DomainError):
            mc.estimate_price_mc(make_params(3, 1), 1.0, MCConfig(), mix=1.0)


class TestLastPassage:
    @pytest.mark.parametrize("nu", [0.5, 1.5])
    def test_getoor_law(self, nu):
        n = 1_000_000
        g = mc.sample_g1(nu, rng(5), n)
        # P(g_1 <= t) = Q(nu, 1/(2t)); 2 g_1 is inverse gamma
        stat = ss.kstest(2 * g, ss.invgamma(nu).cdf).statistic
        assert stat < 1.63 / math.sqrt(n)

    def test_mean_nu2(self):
        g = mc.sample_g1(2.0, rng(6), 1_000_000)
        se = g.std() / math.sqrt(g.size)
        assert abs(g.mean() - 0.5) <= 3 * se

    def test_heavy_tail_nu_half(self):
        g = mc.sample_g1(0.5, rng(8), 1_000_000)
        means = [np.minimum(g, cap).mean() for cap in (1e2, 1e4, 1e6)]
        assert means[0] < means[1] < means[2]

    @pytest.mark.parametrize("delta, k", [(3, 0.5), (5, 0.8), (3, 2.0), (5, 1.5)])
    def test_from_level_survival(self, delta, k):
        nu = delta / 2 - 1
        n = 200_000
        g = mc.sample_g1_from(nu, k, rng(12), n)
        mass = 1.0 if k <= 1 else k ** (-2 * nu)
        for t in (0.05, 0.3, 1.0, 4.0):
            emp = float(np.mean(g > t))
            ref = A.last_passage_survival(delta, k, t) / mass
            assert abs(emp - ref) < 5 * math.sqrt(ref * (1 - ref) / n) + 2e-4

    def test_unconditional_has_zeros(self):
        g = mc.sample_g1_from(0.5, 2.0, rng(1), 100_000, conditional=False)
        assert np.mean(g == 0.0) == pytest.approx(1 - 0.5, abs=0.01)


class TestHitting:
    def test_mean_example(self):
        cfg = MCConfig(n_samples=100_000, seed=3, path_step=1e-3)
        est = mc.estimate_hitting(3, 1.0, cfg)
        assert abs(est.mean - 1 / 3) <= max(3 * est.std_err, 0.02 / 3)

    def test_laplace_example(self):
        cfg = MCConfig(n_samples=50_000, seed=3, path_step=1e-3)
        est = mc.estimate_hitting(3, 1.0, cfg, lam=0.5)
        assert abs(est.mean - 1 / math.sinh(1.0)) <= max(3 * est.std_err, 0.02 * 0.85)

    def test_general_delta_euler(self):
        cfg = MCConfig(n_samples=20_000, seed=5, path_step=1e-3)
        est = mc.estimate_hitting(4.5, 1.0, cfg)
        assert abs(est.mean - 1 / 4.5) <= max(3 * est.std_err, 0.02 / 4.5)

    def test_scaling(self):
        cfg = MCConfig(n_samples=20_000, seed=1, path_step=1e-3)
        a, _, _ = mc.hitting_times(3, 1.0, cfg, rng(1), 20_000)
        b, _, _ = mc.hitting_times(3, 0.5, cfg, rng(2), 20_000)
        assert ss.ks_2samp(a, 4 * b).pvalue > 1e-3

    def test_bias_shrinks(self):
        biases = []
        for step in (4e-2, 1e-2, 2.5e-3):
            est = mc.estimate_hitting(3, 1.0, MCConfig(n_samples=20_000, seed=2, path_step=step, bridge_correction=False))
            biases.append(abs(est.mean - 1 / 3))
        assert biases[0] > biases[1] > biases[2]

    def test_single_draw(self):
        t = mc.sample_hitting_time(3, 1.0, MCConfig(path_step=1e-3), rng())
        assert t > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            mc.hitting_times(2, 1, MCConfig(), rng(), 10)
        with pytest.raises(DomainError):
            mc.hitting_times(3, 0, MCConfig(), rng(), 10)


class TestLambda:
    def test_histogram_invariants(self):
        p = make_params(3, 1)
        edges = np.geomspace(1e-3, 1e3, 30)
        h = mc.estimate_lambda_density(p, MCConfig(n_samples=40_000, seed=2, path_step=1e-3), edges)
        assert math.isclose(h.masses.sum(), h.total_weight, rel_tol=1e-12)
        assert h.normalized().sum() == pytest.approx(1.0, abs=1e-12)
        assert abs(h.mean_weight.z_score(1.0)) <= 3

    def test_law_matches_density(self):
        p = make_params(3, 1)
        edges = np.concatenate(([0.0], np.geomspace(1e-2, 1e2, 25), [np.inf]))
        n = 100_000
        h = mc.estimate_lambda_density(p, MCConfig(n_samples=n, seed=4, path_step=1e-3), edges)
        cdf = dict(zip(edges, quad.density_cdf(p, edges)))
        assert mc.ks_distance(h, cdf.__getitem__, per_sample=True) < 4 / math.sqrt(n)

    def test_ks_distance_trivial(self):
        edges = np.array([0.0, 1.0, 2.0, 3.0])
        cdf = lambda x: min(x / 3.0, 1.0)
        exact = mc.WeightedHistogram(edges, np.array([1.0, 1.0, 1.0]), 3.0, 3)
        assert mc.ks_distance(exact, cdf) == pytest.approx(0.0, abs=1e-15)
        half = mc.WeightedHistogram(np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.0]), 1.0, 1)
        assert mc.ks_distance(half, lambda x: {0.0: 0.0, 1.0: 0.5, 2.0: 1.0}[x]) == pytest.approx(0.5)

    def test_needs_strike(self):
        with pytest.raises(DomainError):
            mc.estimate_lambda_density(make_params(3, 0), MCConfig(), [0, 1])
        with pytest.raises(DomainError):
            mc.estimate_lambda_density(make_params(3, 1), MCConfig(), [1, 0])
