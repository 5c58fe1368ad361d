"""Deterministic prices of calls on the strict local martingale R_t^-(delta-2).

r_K(t) = E_1[(R_t^(2-delta) - K)^+] for a Bessel process R of dimension
delta > 2 started at 1, with index nu = delta/2 - 1 and dual level
k = K^(-1/(delta-2)). Four independent evaluation routes are provided:

* ``closed3``      delta = 3 only, in terms of N~ and phi;
* ``integral``     a one-dimensional integral over y in [0, k/t], split into an
                   elementary piece and a piece carrying I_nu minus its leading
                   power term;
* ``last_passage`` difference of two last-passage survival probabilities,
                   P_0(g_1 > t) - P_k(g_1 > t);
* ``k0``           K = 0, a regularised incomplete gamma value.

Closed-form Laplace transforms, asymptotic constants and a majorant are
collected here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._jit import jit
from .errors import DomainError, QuadratureError
from .quad import MODE_ALG_TAIL, QuadratureSpec, _adaptive
from .specfun import (
    SQRT_2_OVER_PI,
    _bessel_i_scaled,
    _bessel_i_tail_scaled,
    _bessel_k_scaled,
    _log_bessel_i,
    _lower_gamma_reg,
    _n_tilde,
    _phi,
    _upper_gamma_reg,
)

METHODS = ("closed3", "integral", "last_passage", "k0")


@dataclass(frozen=True)
class ModelParams:
    """Dimension, index, strike and dual level of one pricing problem."""

    delta: float
    nu: float
    strike: float
    dual_level: float

    @classmethod
    def from_level(cls, delta: float, k: float) -> "ModelParams":
        """Parameters from the dual level k instead of the strike."""
        if not k > 0.0:
            raise DomainError(f"dual level must be positive, got {k}")
        p = make_params(delta, k ** (-(delta - 2.0)))
        return cls(p.delta, p.nu, p.strike, float(k))

    @property
    def is_bes3(self) -> bool:
        return self.delta == 3.0


@dataclass(frozen=True)
class PricePoint:
    t: float
    value: float
    method: str


def make_params(delta: float, strike: float) -> ModelParams:
    delta = float(delta)
    strike = float(strike)
    if not delta > 2.0:
        raise DomainError("delta must exceed 2")
    if not strike >= 0.0 or math.isinf(strike):
        raise DomainError("strike must be a finite number >= 0")
    nu = delta / 2.0 - 1.0
    k = strike ** (-1.0 / (delta - 2.0)) if strike > 0.0 else math.inf
    return ModelParams(delta, nu, strike, k)


def _need_strike(p: ModelParams):
    if not p.strike > 0.0:
        raise DomainError("this route needs a positive strike (use price_k0 for K = 0)")


def _need_time(t):
    if not t > 0.0:
        raise DomainError(f"maturity must be positive, got {t}")


# --------------------------------------------------------------------------
# delta = 3 closed form


@jit
def _bes3_closed(k, t):
    s = math.sqrt(t)
    a = (1.0 - k) / s
    b = (1.0 + k) / s
    if t >= 1.0:
        return _n_tilde(1.0 / s) + (1.0 - k) / (2.0 * k) * _phi(a) - (1.0 + k) / (2.0 * k) * _phi(b)
    # same expression with N~ = 1 - erfc(./sqrt 2): the constants cancel
    # exactly, leaving terms that stay accurate when the price is tiny
    h = 1.0 / math.sqrt(2.0)
    ea = math.exp(-0.5 * a * a)
    eb = math.exp(-0.5 * b * b)
    return (
        -math.erfc(h / s)
        - (1.0 - k) / (2.0 * k) * math.erfc(h * a)
        + (1.0 + k) / (2.0 * k) * math.erfc(h * b)
        + SQRT_2_OVER_PI * s / (2.0 * k) * (ea - eb)
    )


def price_bes3_closed(p: ModelParams, t: float) -> float:
    """Closed-form price for delta = 3 in terms of N~ and phi (odd extensions)."""
    if not p.is_bes3:
        raise DomainError("closed form is only available for delta = 3")
    _need_strike(p)
    _need_time(t)
    return max(_bes3_closed(p.dual_level, float(t)), 0.0)


def bes3_components(p: ModelParams, t: float, exp_term: str = "sinh") -> tuple[float, float]:
    """Split of the delta = 3 price into its N~ part and its exponential part.

    Returns ``(r_tilde, r_exp)`` with
    r_exp = sqrt(2t/pi) / k * exp(-(1+k^2)/2t) * sinh(k/t).
    ``exp_term="cosh"`` swaps in cosh(k/t); that transcription is wrong and is
    kept only so the regression tests can show it disagreeing with the other
    routes.
    """
    if not p.is_bes3:
        raise DomainError("the split is only defined for delta = 3")
    _need_strike(p)
    _need_time(t)
    k = p.dual_level
    s = math.sqrt(t)
    na = _n_tilde((1.0 - k) / s)
    nb = _n_tilde((1.0 + k) / s)
    r_tilde = (_n_tilde(1.0 / s) - 0.5 * (na + nb)) + (na - nb) / (2.0 * k)
    ea = math.exp(-((1.0 - k) ** 2) / (2.0 * t))
    eb = math.exp(-((1.0 + k) ** 2) / (2.0 * t))
    if exp_term == "sinh":
        hyp = 0.5 * (ea - eb)
    elif exp_term == "cosh":
        hyp = 0.5 * (ea + eb)
    else:
        raise DomainError(f"exp_term must be 'sinh' or 'cosh', got {exp_term!r}")
    r_exp = math.sqrt(2.0 * t / math.pi) / k * hyp
    return r_tilde, r_exp


# --------------------------------------------------------------------------
# integral representation


@jit
def _r1_integrand(u, args):
    nu = args[0]
    k = args[1]
    y = math.exp(u)
    return math.exp(args[2] + nu * math.log(0.5 * y) - y / (2.0 * k)) * (-math.expm1(-0.5 * k * y))


@jit
def _r2_integrand(u, args):
    y = math.exp(u)
    return math.exp(args[2] - args[3] * y) * _bessel_i_tail_scaled(args[0], y)


@jit(cache=False)
def _price_integral(nu, k, t, abs_tol, rel_tol, max_sub):
    # both pieces are integrated in u = ln y, where dy / y = du
    top = k / t
    u_lo = math.log(min(top, 1.0)) - 40.0 / (nu + 1.0)
    m = nu + 1.0
    c = m + 45.0
    for _ in range(4):
        c = m + 45.0 + m * math.log(c / m)
    u1 = math.log(min(top, 2.0 * k * c))
    rate = (k - 1.0) ** 2 / (2.0 * k)
    y2 = math.inf if rate == 0.0 else max(30.0, 2.0 * nu * nu) + 50.0 / rate
    u2 = math.log(min(top, y2))
    ln1 = math.log(nu) - nu * math.log(k) - math.lgamma(nu + 1.0)
    ln2 = math.log(nu) - nu * math.log(k)
    n1 = max(2, int((u1 - u_lo) / 2.0) + 1)
    n2 = max(2, int((u2 - u_lo) / 2.0) + 1)
    r1, e1, c1, ok1 = _adaptive(
        _r1_integrand, (nu, k, ln1, 0.0), 0, 0.0, 1.0, 2.0, u_lo, u1, n1, 0.5 * abs_tol, rel_tol, max_sub
    )
    r2, e2, c2, ok2 = _adaptive(
        _r2_integrand, (nu, k, ln2, rate), 0, 0.0, 1.0, 2.0, u_lo, u2, n2, 0.5 * abs_tol, rel_tol, max_sub
    )
    return r1, r2, e1 + e2, c1 + c2, ok1 and ok2


def integral_parts(p: ModelParams, t: float, q: QuadratureSpec | None = None) -> tuple[float, float, float]:
    """The two pieces (r1, r2) of the integral route and their joint error estimate.

    r1 = nu/k^nu int_0^{k/t} dy/y (y/2)^nu / Gamma(nu+1) e^{-y/2k} (1 - e^{-ky/2})
    r2 = nu/k^nu int_0^{k/t} dy/y e^{-(y/2)(k+1/k)} Itilde_nu(y)
    """
    _need_strike(p)
    _need_time(t)
    q = q or QuadratureSpec()
    r1, r2, err, _, ok = _price_integral(p.nu, p.dual_level, float(t), q.abs_tol, q.rel_tol, q.max_subdivisions)
    if not ok:
        raise QuadratureError(f"integral route missed tolerance at t={t} (err {err:.3g})", (r1, r2, err))
    return r1, r2, err


def price_general_integral(p: ModelParams, t: float, q: QuadratureSpec | None = None) -> float:
    """Price from the integral representation, valid for every delta > 2."""
    r1, r2, _ = integral_parts(p, t, q)
    return max(r1 - r2, 0.0)


# --------------------------------------------------------------------------
# densities and last passage


@jit
def _transition_density(nu, t, x, y):
    if y <= 0.0:
        return 0.0
    if x == 0.0:
        return math.exp(
            (2.0 * nu + 1.0) * math.log(y) - y * y / (2.0 * t)
            - nu * math.log(2.0) - (nu + 1.0) * math.log(t) - math.lgamma(nu + 1.0)
        )
    z = x * y / t
    return math.exp(nu * math.log(y / x) + math.log(y / t) - (x - y) ** 2 / (2.0 * t)) * _bessel_i_scaled(nu, z)


@jit
def _density_many(nu, t, x, ys, out):
    for i in range(ys.size):
        out[i] = _transition_density(nu, t, x, ys[i])


@jit
def _last_passage_density(s, args):
    return args[0] * _transition_density(args[0], s, args[1], 1.0)


@jit(cache=False)
def _survival(nu, x, t, abs_tol, rel_tol, max_sub):
    # nu * int_t^inf p_s(x, 1) ds with an algebraic tail map of power nu + 1
    p = nu + 1.0
    c = max(t, 1.0)
    u_min = 1e-15
    v, e, n, ok = _adaptive(
        _last_passage_density, (nu, x), MODE_ALG_TAIL, t, c, p, u_min, 1.0, 8, abs_tol, rel_tol, max_sub
    )
    s_max = t - c + c * u_min ** (-1.0 / nu)
    rem = _last_passage_density(s_max, (nu, x)) * s_max / nu
    return v + rem, e + abs(rem) * min(1.0, 10.0 * (1.0 + x * x) / s_max), ok


def transition_density(delta: float, t: float, x: float, y: float) -> float:
    """Density in y of R_t for a Bessel process of dimension delta started at x."""
    if not delta > 2.0:
        raise DomainError("delta must exceed 2")
    _need_time(t)
    if not x >= 0.0:
        raise DomainError("start must be >= 0")
    if not y > 0.0:
        raise DomainError("y must be positive")
    return _transition_density(delta / 2.0 - 1.0, float(t), float(x), float(y))


def last_passage_survival(delta: float, x: float, t: float, q: QuadratureSpec | None = None) -> float:
    """P_x(g_1 > t), where g_1 is the last time the process sits at level 1.

    From 0 the law of g_1 is that of 1/(2 gamma_nu); otherwise the density
    nu * p_s(x, 1) is integrated over [t, inf).
    """
    if not delta > 2.0:
        raise DomainError("delta must exceed 2")
    _need_time(t)
    if not x >= 0.0:
        raise DomainError("start must be >= 0")
    nu = delta / 2.0 - 1.0
    if x == 0.0:
        return _lower_gamma_reg(nu, 1.0 / (2.0 * t))
    q = q or QuadratureSpec()
    v, err, ok = _survival(nu, float(x), float(t), q.abs_tol, q.rel_tol, q.max_subdivisions)
    if not ok:
        raise QuadratureError(f"last-passage integral missed tolerance at t={t} (err {err:.3g})", v)
    return min(max(v, 0.0), 1.0)


def price_via_last_passage(p: ModelParams, t: float, q: QuadratureSpec | None = None) -> float:
    """Price as P_0(g_1 > t) - P_k(g_1 > t)."""
    _need_strike(p)
    _need_time(t)
    q = q or QuadratureSpec()
    head = _lower_gamma_reg(p.nu, 1.0 / (2.0 * t))
    v, err, ok = _survival(p.nu, p.dual_level, float(t), q.abs_tol, q.rel_tol, q.max_subdivisions)
    if not ok:
        raise QuadratureError(f"last-passage integral missed tolerance at t={t} (err {err:.3g})", head - v)
    return max(head - v, 0.0)


def price_k0(delta: float, t: float) -> float:
    """E_1[R_t^(2-delta)], the zero-strike price; strictly below 1 for t > 0."""
    if not delta > 2.0:
        raise DomainError("delta must exceed 2")
    _need_time(t)
    return _lower_gamma_reg(delta / 2.0 - 1.0, 1.0 / (2.0 * t))


def price_k0_gap(delta: float, t: float) -> float:
    """1 - E_1[R_t^(2-delta)] > 0, the expectation lost by time t, computed
    directly so that it stays visible when the price rounds to 1."""
    if not delta > 2.0:
        raise DomainError("delta must exceed 2")
    _need_time(t)
    return _upper_gamma_reg(delta / 2.0 - 1.0, 1.0 / (2.0 * t))


def price(p: ModelParams, t: float, method: str | None = None, q: QuadratureSpec | None = None) -> float:
    """Price by the named route; the default is the closed form at delta = 3,
    the incomplete gamma at K = 0 and the integral representation otherwise."""
    if method is None:
        method = "k0" if p.strike == 0.0 else ("closed3" if p.is_bes3 else "integral")
    if method == "k0":
        if p.strike != 0.0:
            raise DomainError("method k0 requires strike 0")
        return price_k0(p.delta, t)
    if method == "closed3":
        return price_bes3_closed(p, t)
    if method == "integral":
        return price_general_integral(p, t, q)
    if method == "last_passage":
        return price_via_last_passage(p, t, q)
    raise DomainError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


def price_point(p: ModelParams, t: float, method: str | None = None, q: QuadratureSpec | None = None) -> PricePoint:
    if method is None:
        method = "k0" if p.strike == 0.0 else ("closed3" if p.is_bes3 else "integral")
    return PricePoint(float(t), price(p, t, method, q), method)


# --------------------------------------------------------------------------
# constants and asymptotics


def tail_constant(p: ModelParams) -> float:
    """C with r_K(t) ~ C t^-(nu+1) as t -> inf, in the k^2 form."""
    _need_strike(p)
    nu = p.nu
    return p.dual_level ** 2 / (2.0 ** (nu + 1.0) * (nu + 1.0) * math.gamma(nu))


def tail_constant_strike_form(p: ModelParams) -> float:
    """Same constant written with K^(1/nu) in the denominator."""
    _need_strike(p)
    nu = p.nu
    return 1.0 / (2.0 ** (nu + 1.0) * (nu + 1.0) * math.gamma(nu) * p.strike ** (1.0 / nu))


def k0_tail_constant(delta: float) -> float:
    """c with r_0(t) ~ c t^-nu as t -> inf."""
    nu = delta / 2.0 - 1.0
    return 1.0 / (2.0 ** nu * math.gamma(1.0 + nu))


def small_t_slope(p: ModelParams) -> float:
    """Slope s in r_1(t) ~ s sqrt(t) as t -> 0 (at-the-money only)."""
    if p.strike != 1.0:
        raise DomainError("the small-time slope is defined for strike 1 only")
    return 2.0 * p.nu / math.sqrt(2.0 * math.pi)


def normalization_constant(p: ModelParams) -> float:
    """delta * K^(2/(delta-2)) = delta / k^2."""
    _need_strike(p)
    return p.delta / p.dual_level ** 2


def price_total_mass(p: ModelParams) -> float:
    """Exact int_0^inf r_K(t) dt from the Green function of the process.

    Equals k^2/delta when k <= 1 (K >= 1). For k > 1 the mass is smaller, so
    delta/k^2 * r_K is then a sub-probability density.
    """
    _need_strike(p)
    k, nu, delta = p.dual_level, p.nu, p.delta
    if k <= 1.0:
        return k * k / delta
    m = k ** (-2.0 * nu)
    j = math.log(k) if nu == 1.0 else (k ** (2.0 - 2.0 * nu) - 1.0) / (2.0 - 2.0 * nu)
    return (0.5 - m / delta + j - 0.5 * m * (k * k - 1.0)) / nu


def upper_bound(p: ModelParams, t: float) -> float:
    """Majorant c_nu t^-nu (1 - exp(-k^2 / 2t)), c_nu = 1 / (2^nu Gamma(1+nu)).

    Comes from started-at-0 domination and scaling; for delta = 3 it is
    sqrt(2/(pi t)) (1 - exp(-1/(2 t K^2))).
    """
    _need_strike(p)
    _need_time(t)
    nu = p.nu
    return math.exp(-nu * math.log(2.0) - math.lgamma(1.0 + nu) - nu * math.log(t)) * (
        -math.expm1(-p.dual_level ** 2 / (2.0 * t))
    )


# --------------------------------------------------------------------------
# Laplace transforms


def _need_rate(lam):
    if not lam > 0.0:
        raise DomainError(f"lambda must be positive, got {lam}")


def laplace_hitting(p: ModelParams, lam: float) -> float:
    """E_0[exp(-lam T_k)] for the first hitting time of k from 0."""
    _need_strike(p)
    _need_rate(lam)
    nu = p.nu
    z = p.dual_level * math.sqrt(2.0 * lam)
    return math.exp(nu * math.log(0.5 * z) - math.lgamma(nu + 1.0) - _log_bessel_i(nu, z))


def laplace_last_passage(delta: float, lam: float) -> float:
    """E_0[exp(-lam g_1)] for the last passage time at 1 from 0."""
    if not delta > 2.0:
        raise DomainError("delta must exceed 2")
    _need_rate(lam)
    nu = delta / 2.0 - 1.0
    z = math.sqrt(2.0 * lam)
    return math.exp(math.log(2.0) - math.lgamma(nu) + nu * math.log(0.5 * z) - z) * _bessel_k_scaled(nu, z)


def laplace_lambda_closed(p: ModelParams, lam: float) -> float:
    """Closed-form transform 2 delta/(k^2 lam) K_nu(z) {nu I_nu(kz)/k^nu - (z/2)^nu/Gamma(nu)}.

    z = sqrt(2 lam). The bracket equals nu/k^nu * Itilde_nu(kz), which is how
    it is evaluated, so small lam loses nothing to cancellation. It is the
    transform of delta/k^2 * r_K only when k <= 1.
    """
    _need_strike(p)
    _need_rate(lam)
    nu, k, delta = p.nu, p.dual_level, p.delta
    z = math.sqrt(2.0 * lam)
    kz = k * z
    tail = _bessel_i_tail_scaled(nu, kz)
    if tail <= 0.0:
        return 0.0
    log_v = (
        math.log(2.0 * delta * nu) - (2.0 + nu) * math.log(k) - math.log(lam)
        + math.log(_bessel_k_scaled(nu, z)) - z + math.log(tail) + kz
    )
    return math.exp(log_v)


def laplace_lambda_bes3(p: ModelParams, lam: float) -> float:
    """delta = 3 transform 3/(lam k^2) e^{-z} (sinh(kz)/(kz) - 1), z = sqrt(2 lam)."""
    if not p.is_bes3:
        raise DomainError("this transform is the delta = 3 case")
    _need_strike(p)
    _need_rate(lam)
    k = p.dual_level
    z = math.sqrt(2.0 * lam)
    x = k * z
    if x < 0.1:
        x2 = x * x
        bracket = math.exp(-z) * x2 * (1.0 / 6.0 + x2 / 120.0 + x2 * x2 / 5040.0 + x2 ** 3 / 362880.0)
    else:
        bracket = (math.exp(x - z) - math.exp(-x - z)) / (2.0 * x) - math.exp(-z)
    return 3.0 / (lam * k * k) * bracket
