"""Independent reference values built on mpmath and scipy only."""

import mpmath as mp

mp.mp.dps = 30


def density(delta, t, x, y):
    nu = mp.mpf(delta) / 2 - 1
    t, x, y = mp.mpf(t), mp.mpf(x), mp.mpf(y)
    if x == 0:
        return y ** (2 * nu + 1) * mp.exp(-y * y / (2 * t)) / (2 ** nu * t ** (nu + 1) * mp.gamma(nu + 1))
    return (y / t) * (y / x) ** nu * mp.exp(-(x - y) ** 2 / (2 * t)) * mp.besseli(nu, x * y / t) * mp.exp(-x * y / t)


def price(delta, strike, t):
    """E_1[(R_t^(2 - delta) - K)^+] by quadrature of the transition density."""
    nu = mp.mpf(delta) / 2 - 1
    K = mp.mpf(strike)
    k = K ** (-1 / (2 * nu)) if K > 0 else mp.inf
    s = mp.sqrt(t)
    pts = [0] + sorted({min(k, max(mp.mpf(0), 1 + c * s)) for c in (-8, -4, -2, 0, 2, 4, 8)} | {k if k < mp.inf else 1 + 40 * s})
    pts = sorted(set(p for p in pts if p <= (k if k < mp.inf else 1 + 40 * s)))
    return float(mp.quad(lambda y: (y ** (-2 * nu) - K) * density(delta, t, 1, y), pts))


def bes3_closed(strike, t):
    """Elementary delta = 3 price: E_1[(1/R_t - K)^+] with the reflected
    Brownian density written out and integrated symbolically."""
    K, t = mp.mpf(strike), mp.mpf(t)
    k = 1 / K
    s = mp.sqrt(t)
    N = lambda x: mp.ncdf(x)
    # E_1[1/R_t ; R_t < k] - K P_1(R_t < k), with p(y) = y (n((y-1)/s) - n((y+1)/s)) / s
    part1 = N((k - 1) / s) - N(-1 / s) - (N((k + 1) / s) - N(1 / s))
    gauss = lambda m: s * (mp.npdf(-m / s) - mp.npdf((k - m) / s)) + m * (N((k - m) / s) - N(-m / s))
    part2 = gauss(1) - gauss(-1)
    return float(part1 - K * part2)
