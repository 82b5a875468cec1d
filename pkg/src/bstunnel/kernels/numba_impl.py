"""numba-compiled versions of the hot kernels (same signatures as numpy_impl)."""

import math

import numpy as np
from numba import njit

EULER_GAMMA = 0.57721566490153286061
_EPS = 1e-16
_FPMIN = 1e-300
_ASYMPTOTIC_Z = 1e5


@njit(cache=True, nogil=True)
def _e1_series_scalar(x):
    term = 1.0
    acc = 0.0
    n = 1
    while n < 200:
        term *= -x / n
        contrib = term / n
        acc += contrib
        if abs(contrib) < _EPS * abs(acc):
            break
        n += 1
    return -EULER_GAMMA - math.log(x) - acc


@njit(cache=True, nogil=True)
def _e1_cf_scaled_scalar(x):
    b = x + 1.0
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


@njit(cache=True, nogil=True)
def e1_scaled_scalar(x):
    if x <= 1.0:
        return math.exp(x) * _e1_series_scalar(x)
    return _e1_cf_scaled_scalar(x)


@njit(cache=True, nogil=True)
def e1_scalar(x):
    if x <= 1.0:
        return _e1_series_scalar(x)
    return math.exp(-x) * _e1_cf_scaled_scalar(x)


@njit(cache=True, nogil=True)
def _e1_scaled_flat(x, out):
    for k in range(x.size):
        out[k] = e1_scaled_scalar(x[k])


@njit(cache=True, nogil=True)
def _e1_flat(x, out):
    for k in range(x.size):
        out[k] = e1_scalar(x[k])


def e1_scaled(x):
    """Return ``exp(x) * E1(x)`` elementwise for ``x > 0``."""
    x = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(x).ravel()
    out = np.empty_like(flat)
    _e1_scaled_flat(flat, out)
    return out.reshape(x.shape)


def e1(x):
    """Return the exponential integral E1 elementwise for ``x > 0``."""
    x = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(x).ravel()
    out = np.empty_like(flat)
    _e1_flat(flat, out)
    return out.reshape(x.shape)


@njit(cache=True, nogil=True)
def _laplace_product(u, w, c_const, out):
    for k in range(u.size):
        prod = 1.0
        for i in range(w.size):
            z = 1.0 / (c_const * u[k] * w[i])
            if z > _ASYMPTOTIC_Z:
                r = 1.0 / z
                prod *= 1.0 - r + 2.0 * r * r - 6.0 * r * r * r
            else:
                prod *= z * e1_scaled_scalar(z)
        out[k] = prod


def laplace_product(u, w, c_const):
    """Product over tags of ``z e^z E1(z)`` with ``z = 1/(c_const u w_i)``."""
    u = np.ascontiguousarray(u, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    out = np.empty_like(u)
    _laplace_product(u, w, float(c_const), out)
    return out


@njit(cache=True, nogil=True)
def _count_hits(x2, y2, phase, h2, inv_c, c_const, use_phase):
    runs, n = x2.shape
    hits = 0
    for r in range(runs):
        re = 0.0
        im = 0.0
        for i in range(n):
            a = math.sqrt(x2[r, i] * y2[r, i]) * inv_c[i]
            if use_phase:
                re += a * math.cos(phase[r, i])
                im += a * math.sin(phase[r, i])
            else:
                re += a
        if c_const * (re * re + im * im) >= h2[r]:
            hits += 1
    return hits


def count_hits(x2, y2, phase, h2, inv_c, c_const, use_phase):
    """Count trials with ``c_const * |sum_i a_i exp(j phase_i)|^2 >= h2``."""
    if phase is None:
        phase = np.zeros((0, 0))
    return int(_count_hits(x2, y2, phase, h2, inv_c, float(c_const), bool(use_phase)))
