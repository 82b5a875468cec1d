"""Vectorised numpy versions of the hot kernels."""

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_SERIES_TERMS = 30
_CF_MAXITER = 500
_EPS = 1e-16
_FPMIN = 1e-300
# z e^z E1(z) = 1 - 1/z + 2/z^2 - 6/z^3 + ... ; truncation error < 24/z^4
_ASYMPTOTIC_Z = 1e5


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{n>=1} (-x)^n / (n n!)
    term = np.ones_like(x)
    acc = np.zeros_like(x)
    for n in range(1, _SERIES_TERMS + 1):
        term = term * (-x) / n
        acc = acc + term / n
    return -EULER_GAMMA - np.log(x) - acc


def _e1_cf_scaled(x):
    # modified Lentz on the continued fraction of e^x E1(x)
    b = x + 1.0
    c = np.full_like(x, 1.0 / _FPMIN)
    d = 1.0 / b
    h = d.copy()
    active = np.ones(x.shape, dtype=bool)
    for i in range(1, _CF_MAXITER + 1):
        an = -float(i * i)
        b = b + 2.0
        d_new = 1.0 / (an * d + b)
        c_new = b + an / c
        delta = c_new * d_new
        d = np.where(active, d_new, d)
        c = np.where(active, c_new, c)
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) >= _EPS
        if not active.any():
            break
    return h


def e1_scaled(x):
    """Return ``exp(x) * E1(x)`` elementwise for ``x > 0``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= 1.0
    if small.any():
        xs = x[small]
        out[small] = np.exp(xs) * _e1_series(xs)
    if (~small).any():
        out[~small] = _e1_cf_scaled(x[~small])
    return out


def e1(x):
    """Return the exponential integral E1 elementwise for ``x > 0``."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    small = x <= 1.0
    if small.any():
        out[small] = _e1_series(x[small])
    if (~small).any():
        xl = x[~small]
        out[~small] = np.exp(-xl) * _e1_cf_scaled(xl)
    return out


def _z_e1_scaled(z):
    out = np.empty_like(z)
    big = z > _ASYMPTOTIC_Z
    if big.any():
        r = 1.0 / z[big]
        out[big] = 1.0 - r + 2.0 * r * r - 6.0 * r * r * r
    if (~big).any():
        zs = z[~big]
        out[~big] = zs * e1_scaled(zs)
    return out


def laplace_product(u, w, c_const):
    """Product over tags of ``z e^z E1(z)`` with ``z = 1/(c_const u w_i)``.

    ``u`` is a 1-D array of positive abscissae, ``w`` the per-tag weights.
    """
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if w.size == 0:
        return np.ones_like(u)
    z = 1.0 / (c_const * np.outer(u, w))
    return np.prod(_z_e1_scaled(z.ravel()).reshape(z.shape), axis=1)


def count_hits(x2, y2, phase, h2, inv_c, c_const, use_phase):
    """Count trials with ``c_const * |sum_i a_i exp(j phase_i)|^2 >= h2``.

    ``a_i = sqrt(x2 * y2) * inv_c`` row-wise; ``phase`` is ignored when
    ``use_phase`` is false (coherent, zero-residual combining).
    """
    a = np.sqrt(x2 * y2) * inv_c
    if use_phase:
        re = np.sum(a * np.cos(phase), axis=1)
        im = np.sum(a * np.sin(phase), axis=1)
        power = re * re + im * im
    else:
        s = np.sum(a, axis=1)
        power = s * s
    return int(np.count_nonzero(c_const * power >= h2))
