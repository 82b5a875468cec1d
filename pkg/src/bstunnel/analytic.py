"""Closed-form and quadrature estimators of P(N).

Adjustable phases: Gaussian (non-central chi-square MGF) and Gamma
moment-matched forms.  Random phases: the exact single integral over the
Laplace transform of the power sum, a second-order delta-method form and a
Gamma form through the upper incomplete gamma function.

Every estimator returns 0 for ``N = 0`` or ``c_const = 0`` and clamps its
result into ``[0, 1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .geometry import DeploymentLayout
from .quadrature import QuadratureError, gauss_kronrod
from .specfun import gamma_moment_match, log_upper_incomplete_gamma

METHODS = ("mc", "gauss", "gamma", "exact")


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    method: str
    stderr: float | None = None
    runs: int | None = None
    seed: int | None = None
    clamped: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability out of range: {self.value}")


def _clamped(value: float, method: str) -> ProbabilityEstimate:
    clipped = min(max(value, 0.0), 1.0)
    return ProbabilityEstimate(clipped, method, clamped=clipped != value)


@dataclass(frozen=True)
class AdjustableMoments:
    """Mean and variance of the coherent sum ``G_a = sum_i a_i e^{j delta_i}``."""

    mu_G: float
    sigma2_G: float


@dataclass(frozen=True)
class RandomMoments:
    """Mean and variance of the power sum ``T = sum_i w_i X_i Y_i``."""

    mu_T: float
    sigma2_T: float


def adjustable_moments(layout: DeploymentLayout, sigma_delta: float) -> AdjustableMoments:
    # E[a_i] = pi/(4 c_i), E[a_i^2] = 1/c_i^2, E[e^{j delta}] = e^{-sigma^2/2}
    if sigma_delta < 0:
        raise ValueError(f"sigma_delta must be >= 0, got {sigma_delta}")
    inv_c = 1.0 / layout.c
    mu = math.exp(-0.5 * sigma_delta**2) * float(np.sum(np.pi / 4.0 * inv_c))
    s2 = float(np.sum(inv_c**2 * (1.0 - math.exp(-(sigma_delta**2)) * np.pi**2 / 16.0)))
    return AdjustableMoments(mu_G=mu, sigma2_G=s2)


def random_moments(layout: DeploymentLayout) -> RandomMoments:
    w = layout.w
    return RandomMoments(mu_T=float(np.sum(w)), sigma2_T=3.0 * float(np.sum(w**2)))


def p_adjustable_gauss(moments: AdjustableMoments, c_const: float) -> ProbabilityEstimate:
    """``1 - (1 + c s2)^(-1/2) exp(-c mu^2 / (1 + c s2))``."""
    if c_const == 0 or (moments.mu_G == 0 and moments.sigma2_G == 0):
        return ProbabilityEstimate(0.0, "gauss")
    denom = 1.0 + c_const * moments.sigma2_G
    mgf = math.exp(-c_const * moments.mu_G**2 / denom) / math.sqrt(denom)
    return _clamped(1.0 - mgf, "gauss")


def p_adjustable_gamma(moments: AdjustableMoments, c_const: float) -> ProbabilityEstimate:
    """``1 - (1 + c theta)^(-k)`` with (k, theta) matched to ``Z = |G_a|^2``."""
    mu2 = moments.mu_G**2
    s2 = moments.sigma2_G
    mean_z = mu2 + s2
    if c_const == 0 or mean_z == 0:
        return ProbabilityEstimate(0.0, "gamma")
    var_z = 2.0 * s2 * s2 + 4.0 * s2 * mu2
    params = gamma_moment_match(mean_z, var_z)
    mgf = math.exp(-params.k * math.log1p(c_const * params.theta))
    return _clamped(1.0 - mgf, "gamma")


def p_random_gauss_delta(moments: RandomMoments, c_const: float) -> ProbabilityEstimate:
    """Second-order delta method for ``E[g(T)]`` with ``g(t) = c t / (1 + c t)``."""
    if c_const == 0 or moments.mu_T == 0:
        return ProbabilityEstimate(0.0, "gauss")
    base = 1.0 + c_const * moments.mu_T
    value = c_const * moments.mu_T / base - c_const**2 * moments.sigma2_T / base**3
    return _clamped(value, "gauss")


def p_random_gamma(moments: RandomMoments, c_const: float) -> ProbabilityEstimate:
    """Gamma approximation of ``T``; ``1 - E[1/(1 + c T)]`` in closed form.

    With ``s = theta c``: ``E[1/(1 + c T)] = e^{1/s} s^{-k} Gamma(1 - k, 1/s)``,
    evaluated in log space so the ``e^{1/s}`` factor never overflows.
    """
    if c_const == 0 or moments.mu_T == 0:
        return ProbabilityEstimate(0.0, "gamma")
    params = gamma_moment_match(moments.mu_T, moments.sigma2_T)
    s = params.theta * c_const
    x = 1.0 / s
    log_mean = x - params.k * math.log(s) + log_upper_incomplete_gamma(1.0 - params.k, x)
    return _clamped(1.0 - math.exp(log_mean), "gamma")


def random_exact_integral(layout: DeploymentLayout, epsabs: float = 1e-10):
    """``E[1/(1 + c0^2 T)]`` as ``int_0^1 prod_i K(z_i(-ln v)) dv``.

    The substitution ``u = -ln v`` absorbs the ``e^{-u}`` weight and maps the
    half line onto ``(0, 1]`` so no tail truncation is needed.  Returns the
    :class:`~bstunnel.quadrature.QuadResult`.
    """
    w = np.asarray(layout.w)
    c = layout.c_const

    def integrand(v):
        return kernels.laplace_product(-np.log(v), w, c)

    return gauss_kronrod(integrand, 0.0, 1.0, epsabs=epsabs, epsrel=0.0)


def p_random_exact(layout: DeploymentLayout, tol: float = 1e-6) -> ProbabilityEstimate:
    if layout.n_tags == 0 or layout.c_const == 0:
        return ProbabilityEstimate(0.0, "exact")
    res = random_exact_integral(layout, epsabs=min(tol, 1e-10))
    if res.error > tol:
        raise QuadratureError("error estimate above tolerance", res.value, res.error, res.intervals)
    return _clamped(1.0 - res.value, "exact")


def p_random_channel_exact(layout: DeploymentLayout, tol: float = 1e-6) -> ProbabilityEstimate:
    """P(N) for random phases without the conditional-Rayleigh step.

    Given the ``f_i``, ``sum_i g_i f_i e^{j phi_i} / c_i`` is exactly
    ``CN(0, sum_i w_i |f_i|^2)`` because each ``g_i`` is circular, so
    ``P = 1 - int_0^inf e^{-u} prod_i 1/(1 + c0^2 u w_i) du``.  It agrees with
    :func:`p_random_exact` only as the per-tag terms become many and balanced;
    :func:`bstunnel.montecarlo.estimate_p` converges to this value.
    """
    if layout.n_tags == 0 or layout.c_const == 0:
        return ProbabilityEstimate(0.0, "exact")
    w = np.asarray(layout.w)
    c = layout.c_const

    def integrand(v):
        u = -np.log(v)
        return np.prod(1.0 / (1.0 + c * np.outer(u, w)), axis=1)

    res = gauss_kronrod(integrand, 0.0, 1.0, epsabs=min(tol, 1e-10), epsrel=0.0)
    if res.error > tol:
        raise QuadratureError("error estimate above tolerance", res.value, res.error, res.intervals)
    return _clamped(1.0 - res.value, "exact")
