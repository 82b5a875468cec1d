"""Independent high-precision references for the special functions."""

import mpmath as mp

mp.mp.dps = 80


def e1_series(x):
    """E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!), summed in 80 digits."""
    x = mp.mpf(x)
    acc = mp.mpf(0)
    term = mp.mpf(1)
    n = 1
    while True:
        term *= -x / n
        contrib = term / n
        acc += contrib
        if abs(contrib) < mp.mpf(10) ** -70 and n > x:
            break
        n += 1
    return -mp.euler - mp.log(x) - acc


def upper_gamma_quad(a, x):
    """Gamma(a, x) by direct quadrature of t^(a-1) e^-t over [x, inf)."""
    a = mp.mpf(a)
    x = mp.mpf(x)
    return mp.quad(lambda t: t ** (a - 1) * mp.exp(-t), [x, x + 1, x + 10, mp.inf])
