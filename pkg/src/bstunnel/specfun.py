"""Special functions and distribution helpers for the closed-form estimators.

E1 and its scaled form dispatch to the accelerated kernels.  The upper
incomplete gamma function accepts any real shape ``a`` (including ``a <= 0``),
which the random-phase Gamma approximation needs because ``1 - k`` is
negative whenever the matched shape exceeds one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels

_EPS = 1e-16
_FPMIN = 1e-300
_MAXITER = 10_000
# CF for Gamma(a, x) converges quickly above this; below it we recurse
_CF_X_MIN = 1.5


def _as_positive(x, what="x"):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(~(arr > 0)):
        raise ValueError(f"{what} must be > 0")
    return arr


def _unwrap(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def e1(x):
    """Exponential integral ``E1(x) = int_x^inf exp(-t)/t dt`` for ``x > 0``."""
    arr = _as_positive(x)
    return _unwrap(kernels.e1(arr), x)


def exp_e1_scaled(x):
    """``exp(x) * E1(x)``, computed without forming ``exp(x)`` for large ``x``."""
    arr = _as_positive(x)
    return _unwrap(kernels.e1_scaled(arr), x)


# --- upper incomplete gamma -------------------------------------------------


def _log_gamma_cf(a, x):
    """log Gamma(a, x) via the Legendre continued fraction (any real a, x > 0)."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b if b != 0 else 1.0 / _FPMIN
    h = d
    for i in range(1, _MAXITER):
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
            return -x + a * math.log(x) + math.log(h)
    raise ArithmeticError(f"incomplete gamma continued fraction did not converge (a={a}, x={x})")


def _gamma_series_upper(a, x):
    """Gamma(a, x) = Gamma(a) - gamma(a, x) for a > 0, lower part by series."""
    ap = a
    term = 1.0 / a
    acc = term
    for _ in range(_MAXITER):
        ap += 1.0
        term *= x / ap
        acc += term
        if abs(term) < abs(acc) * _EPS:
            lower = acc * math.exp(-x + a * math.log(x))
            return math.gamma(a) - lower
    raise ArithmeticError(f"incomplete gamma series did not converge (a={a}, x={x})")


def _upper_gamma_base(a, x):
    if x >= a + 1.0:
        return math.exp(_log_gamma_cf(a, x))
    return _gamma_series_upper(a, x)


def log_upper_incomplete_gamma(a: float, x: float) -> float:
    """Natural log of ``Gamma(a, x)``; finite where the value itself under/overflows."""
    a = float(a)
    x = float(x)
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x}")
    if x >= _CF_X_MIN and x >= a + 1.0:
        return _log_gamma_cf(a, x)
    return math.log(upper_incomplete_gamma(a, x))


def upper_incomplete_gamma(a: float, x: float) -> float:
    """``Gamma(a, x) = int_x^inf t^(a-1) exp(-t) dt`` for real ``a`` and ``x > 0``.

    For ``a <= 0`` and small ``x`` the value is reached by the downward
    recurrence ``Gamma(s-1, x) = (Gamma(s, x) - x^(s-1) e^-x) / (s-1)``
    from a start in ``(0, 1)``, or from ``Gamma(0, x) = E1(x)`` when ``a`` is
    an integer.
    """
    a = float(a)
    x = float(x)
    if not x > 0:
        raise ValueError(f"x must be > 0, got {x}")
    if x >= _CF_X_MIN and x >= a + 1.0:
        return math.exp(_log_gamma_cf(a, x))
    if a > 0:
        return _upper_gamma_base(a, x)

    frac = a - math.floor(a)
    if frac == 0.0:
        s = 0.0
        value = float(kernels.e1(np.array([x]))[0])
    else:
        s = frac
        value = _upper_gamma_base(s, x)
    ex = math.exp(-x)
    while s > a + 0.5:
        s -= 1.0
        value = (value - x**s * ex) / s
    return value


# --- Gamma / Gaussian helpers ----------------------------------------------


@dataclass(frozen=True)
class GammaParams:
    """Gamma distribution with shape ``k`` and scale ``theta``."""

    k: float
    theta: float

    def __post_init__(self):
        if not (self.k > 0 and self.theta > 0):
            raise ValueError(f"Gamma parameters must be positive, got k={self.k}, theta={self.theta}")

    @property
    def mean(self) -> float:
        return self.k * self.theta

    @property
    def variance(self) -> float:
        return self.k * self.theta**2


def gamma_moment_match(mean: float, variance: float) -> GammaParams:
    """Gamma parameters reproducing the given mean and variance exactly."""
    if not mean > 0:
        raise ValueError(f"mean must be positive, got {mean}")
    if not variance > 0:
        raise ValueError(f"variance must be positive (degenerate distribution), got {variance}")
    return GammaParams(k=mean * mean / variance, theta=variance / mean)


def gamma_pdf(params: GammaParams, z):
    z = np.asarray(z, dtype=np.float64)
    k, theta = params.k, params.theta
    with np.errstate(divide="ignore", invalid="ignore"):
        logpdf = (k - 1.0) * np.log(z) - z / theta - math.lgamma(k) - k * math.log(theta)
        out = np.where(z > 0, np.exp(logpdf), 0.0)
    return _unwrap(out, z)


def gaussian_pdf(mean: float, std: float, x):
    if not std > 0:
        raise ValueError(f"std must be positive, got {std}")
    x = np.asarray(x, dtype=np.float64)
    out = np.exp(-0.5 * ((x - mean) / std) ** 2) / (std * math.sqrt(2.0 * math.pi))
    return _unwrap(out, x)
