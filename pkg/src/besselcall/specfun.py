"""Scalar special functions: gamma family, modified Bessel functions, N~ and phi.

Every public function validates its arguments and delegates to an underscored
kernel. The kernels are numba-compiled (see :mod:`besselcall._jit`) and are the
ones used inside integrands elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._jit import jit
from .errors import BesselOverflowError, DomainError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
LOG_2PI = math.log(2.0 * math.pi)
EULER_GAMMA = 0.5772156649015329

_EPS = 1e-17
_FPMIN = 1e-300
_MAX_TERMS = 2000
_UNSCALED_LIMIT = 600.0


@dataclass(frozen=True)
class SeriesSpec:
    """Truncation controls for the power series kernels."""

    term_rel_tol: float = _EPS
    max_terms: int = _MAX_TERMS
    large_arg_floor: float = 30.0

    def __post_init__(self):
        if not 0.0 < self.term_rel_tol < 1e-6:
            raise DomainError("term_rel_tol must lie in (0, 1e-6)")
        if self.max_terms < 50:
            raise DomainError("max_terms must be at least 50")

    def large_arg_switch(self, nu: float) -> float:
        """Argument above which I_nu is taken from its asymptotic expansion."""
        return max(self.large_arg_floor, 2.0 * nu * nu)


SERIES = SeriesSpec()


# --------------------------------------------------------------------------
# kernels


@jit
def _gamma_reg_pair(a, x):
    """(P(a, x), Q(a, x)), each summed on the side where it is accurate."""
    if x <= 0.0:
        return 0.0, 1.0
    if math.isinf(x):
        return 1.0, 0.0
    log_pref = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        ap = a
        term = 1.0 / a
        total = term
        for _ in range(_MAX_TERMS):
            ap += 1.0
            term *= x / ap
            total += term
            if term < total * _EPS:
                break
        p = total * math.exp(log_pref)
        return p, 1.0 - p
    # continued fraction for the complement (modified Lentz)
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_TERMS):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    q = math.exp(log_pref) * h
    return 1.0 - q, q


@jit
def _lower_gamma_reg(a, x):
    return _gamma_reg_pair(a, x)[0]


@jit
def _upper_gamma_reg(a, x):
    return _gamma_reg_pair(a, x)[1]


@jit
def _n_tilde(a):
    if math.isnan(a):
        return a
    v = _lower_gamma_reg(0.5, 0.5 * a * a)
    return v if a >= 0.0 else -v


@jit
def _phi(a):
    if math.isnan(a):
        return a
    x = abs(a)
    if x < 1e-4:
        x2 = x * x
        v = SQRT_2_OVER_PI * x * (0.5 - x2 / 24.0 + x2 * x2 / 240.0 - x2 * x2 * x2 / 2688.0)
    elif math.isinf(x):
        v = 1.0
    else:
        v = _n_tilde(x) - SQRT_2_OVER_PI * (-math.expm1(-0.5 * x * x)) / x
    return v if a >= 0.0 else -v


@jit
def _i_switch(nu):
    return max(30.0, 2.0 * nu * nu)


@jit
def _i_series(nu, y, skip_first):
    # I_nu(y) = exp(log_pref) * total
    q = 0.25 * y * y
    term = 1.0
    total = 0.0 if skip_first else 1.0
    for j in range(1, _MAX_TERMS):
        term *= q / (j * (nu + j))
        total += term
        if term < total * _EPS:
            break
    log_pref = nu * math.log(0.5 * y) - math.lgamma(nu + 1.0)
    return log_pref, total


@jit
def _i_asym_scaled(nu, y):
    mu = 4.0 * nu * nu
    term = 1.0
    total = 1.0
    prev = 1.0
    for k in range(1, 400):
        odd = 2.0 * k - 1.0
        term *= -(mu - odd * odd) / (8.0 * k * y)
        if abs(term) > abs(prev):
            break
        total += term
        if abs(term) < abs(total) * _EPS:
            break
        prev = term
    return total / math.sqrt(2.0 * math.pi * y)


@jit
def _bessel_i_scaled(nu, y):
    if y <= 0.0:
        return 0.0
    if y < _i_switch(nu):
        lp, s = _i_series(nu, y, False)
        return math.exp(lp - y) * s
    return _i_asym_scaled(nu, y)


@jit
def _bessel_i(nu, y):
    if y <= 0.0:
        return 0.0
    if y < _i_switch(nu):
        lp, s = _i_series(nu, y, False)
        return math.exp(lp) * s
    return math.exp(y) * _i_asym_scaled(nu, y)


@jit
def _log_bessel_i(nu, y):
    if y <= 0.0:
        return -math.inf
    if y < _i_switch(nu):
        lp, s = _i_series(nu, y, False)
        return lp + math.log(s)
    return y + math.log(_i_asym_scaled(nu, y))


@jit
def _bessel_i_tail_scaled(nu, y):
    if y <= 0.0:
        return 0.0
    if y < _i_switch(nu):
        lp, s = _i_series(nu, y, True)
        return math.exp(lp - y) * s
    lead = math.exp(nu * math.log(0.5 * y) - math.lgamma(nu + 1.0) - y)
    return _i_asym_scaled(nu, y) - lead


@jit
def _bessel_i_tail(nu, y):
    if y <= 0.0:
        return 0.0
    if y < _i_switch(nu):
        lp, s = _i_series(nu, y, True)
        return math.exp(lp) * s
    return math.exp(y) * _bessel_i_tail_scaled(nu, y)


@jit
def _temme_gammas(mu):
    # gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    if abs(mu) < 1e-3:
        m2 = mu * mu
        # Taylor coefficients of 1/Gamma(1+x)
        gam1 = -(EULER_GAMMA - 0.0420026350340952 * m2 - 0.0421977345555443 * m2 * m2)
        gam2 = 1.0 - 0.6558780715202538 * m2 + 0.1665386113822915 * m2 * m2
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
        gam2 = 0.5 * (gammi + gampl)
    return gam1, gam2, gampl, gammi


@jit
def _bessel_k_scaled(nu, x):
    """exp(x) * K_nu(x) for nu >= 0, x > 0."""
    frac = nu - math.floor(nu)
    if frac == 0.5:
        n = int(nu - 0.5)
        c = 1.0
        total = 1.0
        for j in range(1, n + 1):
            c *= (n + j) * (n - j + 1) / (j * 2.0 * x)
            total += c
        return math.sqrt(math.pi / (2.0 * x)) * total

    nl = int(nu + 0.5)
    mu = nu - nl
    mu2 = mu * mu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    if x < 2.0:
        x2 = 0.5 * x
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < 1e-16 else pimu / math.sin(pimu)
        d = -math.log(x2)
        e = mu * d
        fact2 = 1.0 if abs(e) < 1e-16 else math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(mu)
        ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        total = ff
        e = math.exp(e)
        p = 0.5 * e / gampl
        q = 0.5 / (e * gammi)
        c = 1.0
        d = x2 * x2
        total1 = p
        for i in range(1, _MAX_TERMS):
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= d / i
            p /= i - mu
            q /= i + mu
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * _EPS:
                break
        scale = math.exp(x)
        rkmu = total * scale
        rk1 = total1 * xi2 * scale
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = d
        delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - mu2
        q = a1
        c = a1
        a = -a1
        s = 1.0 + q * delh
        for i in range(2, _MAX_TERMS):
            a -= 2.0 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            q += c * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels / s) < _EPS:
                break
        h = a1 * h
        rkmu = math.sqrt(math.pi / (2.0 * x)) / s
        rk1 = rkmu * (mu + x + 0.5 - h) * xi
    for i in range(1, nl + 1):
        tmp = (mu + i) * xi2 * rk1 + rkmu
        rkmu = rk1
        rk1 = tmp
    return rkmu


@jit
def _bessel_k(nu, x):
    return _bessel_k_scaled(nu, x) * math.exp(-x)


# --------------------------------------------------------------------------
# public surface


def _check_nu(nu):
    if not nu > 0.0:
        raise DomainError(f"order nu must be positive, got {nu}")


def log_gamma(x: float) -> float:
    """Natural log of Gamma(x) for x > 0."""
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return math.lgamma(x)


def reg_lower_gamma(nu: float, x: float) -> float:
    """Regularised lower incomplete gamma P(nu, x) = gamma(nu, x) / Gamma(nu)."""
    _check_nu(nu)
    if not x >= 0.0:
        raise DomainError(f"reg_lower_gamma needs x >= 0, got {x}")
    return _lower_gamma_reg(float(nu), float(x))


def reg_upper_gamma(nu: float, x: float) -> float:
    """Complement Q(nu, x) = 1 - P(nu, x), accurate when it is tiny."""
    _check_nu(nu)
    if not x >= 0.0:
        raise DomainError(f"reg_upper_gamma needs x >= 0, got {x}")
    return _upper_gamma_reg(float(nu), float(x))


def n_tilde(a: float) -> float:
    """sqrt(2/pi) * int_0^a exp(-y^2/2) dy, i.e. erf(a / sqrt 2), odd in a."""
    return _n_tilde(float(a))


def phi(a: float) -> float:
    """sqrt(2/pi) * int_0^a (1 - exp(-y^2/2)) / y^2 dy, odd in a."""
    return _phi(float(a))


def bessel_i(nu: float, y: float, scaled: bool = False) -> float:
    """Modified Bessel function I_nu(y), or exp(-y) I_nu(y) when ``scaled``."""
    _check_nu(nu)
    if not y >= 0.0:
        raise DomainError(f"bessel_i needs y >= 0, got {y}")
    if scaled:
        return _bessel_i_scaled(float(nu), float(y))
    if y > _UNSCALED_LIMIT:
        raise BesselOverflowError(f"unscaled I_nu({y}) overflows; pass scaled=True")
    return _bessel_i(float(nu), float(y))


def bessel_i_tail(nu: float, y: float, scaled: bool = False) -> float:
    """I_nu(y) minus its leading power term (y/2)^nu / Gamma(1+nu).

    Summed from the second series term on, so no cancellation occurs at small
    ``y``; above the asymptotic switch the (negligible) power term is
    subtracted from the scaled asymptotic value.
    """
    _check_nu(nu)
    if not y >= 0.0:
        raise DomainError(f"bessel_i_tail needs y >= 0, got {y}")
    if scaled:
        return _bessel_i_tail_scaled(float(nu), float(y))
    if y > _UNSCALED_LIMIT:
        raise BesselOverflowError(f"unscaled tail of I_nu({y}) overflows; pass scaled=True")
    return _bessel_i_tail(float(nu), float(y))


def bessel_k(nu: float, y: float, scaled: bool = False) -> float:
    """Modified Bessel function of the second kind K_nu(y) (exp(y) K_nu(y) if scaled)."""
    _check_nu(nu)
    if not y > 0.0:
        raise DomainError(f"bessel_k needs y > 0, got {y}")
    if scaled:
        return _bessel_k_scaled(float(nu), float(y))
    return _bessel_k(float(nu), float(y))
