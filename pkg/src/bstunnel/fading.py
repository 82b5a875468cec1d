"""Rayleigh channel draws, tag phase policies and instantaneous link amplitudes.

Every sampler takes an explicit ``numpy.random.Generator``; nothing here holds
state.  Functions accept a single draw (``h`` scalar, ``f``/``g`` of shape
``(N,)``) or a batch (``h`` of shape ``(R,)``, ``f``/``g`` of shape ``(R, N)``).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geometry import DeploymentLayout

TWO_PI = 2.0 * np.pi


class Regime(str, enum.Enum):
    ADJUSTABLE = "adjustable"
    RANDOM = "random"


@dataclass(frozen=True)
class PhasePolicy:
    regime: Regime = Regime.ADJUSTABLE
    sigma_delta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if not self.sigma_delta >= 0:
            raise ValueError(f"sigma_delta must be >= 0, got {self.sigma_delta}")


@dataclass(frozen=True)
class ChannelDraw:
    h: complex | np.ndarray
    f: np.ndarray
    g: np.ndarray

    @property
    def n_tags(self) -> int:
        return int(np.shape(self.f)[-1])


def complex_gaussian(rng: np.random.Generator, shape=()):
    """CN(0, 1) samples: independent real and imaginary parts of variance 1/2."""
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * np.sqrt(0.5)


def sample_channels(rng: np.random.Generator, n_tags: int, size: int | None = None) -> ChannelDraw:
    """Draw ``h``, ``f_i``, ``g_i`` i.i.d. CN(0, 1); ``size`` adds a leading batch axis."""
    if n_tags < 0:
        raise ValueError(f"n_tags must be >= 0, got {n_tags}")
    batch = () if size is None else (size,)
    h = complex_gaussian(rng, batch)
    f = complex_gaussian(rng, batch + (n_tags,))
    g = complex_gaussian(rng, batch + (n_tags,))
    if size is None:
        h = complex(h)
    return ChannelDraw(h=h, f=f, g=g)


def optimal_phase(g, f):
    """Tag phase ``-arg(g f) mod 2 pi`` that makes ``g f e^{j phi}`` real and non-negative."""
    prod = np.asarray(g) * np.asarray(f)
    if np.any(prod == 0):
        raise ValueError("zero channel product: optimal phase undefined")
    phi = np.mod(-np.angle(prod), TWO_PI)
    # mod can round up to exactly 2 pi for tiny positive angles
    phi = np.where(phi >= TWO_PI, 0.0, phi)
    return float(phi) if phi.ndim == 0 else phi


def _check_n(draw: ChannelDraw, layout: DeploymentLayout):
    if draw.n_tags != layout.n_tags:
        raise ValueError(f"draw has {draw.n_tags} tags but layout has {layout.n_tags}")


def backscatter_amplitude(draw: ChannelDraw, layout: DeploymentLayout, policy: PhasePolicy, rng=None):
    """Backscatter amplitude ``A_r = sum_i g_i f_i e^{j(phi_i + delta_i)} / c_i``.

    Adjustable: phases come from :func:`optimal_phase` plus Gaussian residuals
    of std ``sigma_delta``; each aligned term is ``|g_i||f_i|/c_i e^{j delta_i}``.
    Random: phases i.i.d. uniform on ``[0, 2 pi)``; residuals are not drawn
    since they leave a uniform phase uniform.
    """
    _check_n(draw, layout)
    f = np.asarray(draw.f)
    g = np.asarray(draw.g)
    if layout.n_tags == 0:
        zero = np.zeros(f.shape[:-1], dtype=np.complex128)
        return complex(zero) if zero.ndim == 0 else zero

    if policy.regime is Regime.ADJUSTABLE:
        optimal_phase(g, f)  # validates the draw
        terms = np.abs(g) * np.abs(f) / layout.c
        if policy.sigma_delta > 0:
            if rng is None:
                raise ValueError("an rng is required when sigma_delta > 0")
            delta = rng.normal(0.0, policy.sigma_delta, size=terms.shape)
            terms = terms * np.exp(1j * delta)
        else:
            terms = terms.astype(np.complex128)
    else:
        if rng is None:
            raise ValueError("an rng is required for random tag phases")
        phi = rng.uniform(0.0, TWO_PI, size=f.shape)
        terms = g * f * np.exp(1j * phi) / layout.c
    total = terms.sum(axis=-1)
    return complex(total) if total.ndim == 0 else total


def direct_power(draw: ChannelDraw, layout: DeploymentLayout):
    """Direct-link gain ``|h|^2 / d_h^alpha``."""
    p = np.abs(draw.h) ** 2 / layout.d_h**layout.alpha
    return float(p) if np.ndim(p) == 0 else p


def power_sum_T(draw: ChannelDraw, layout: DeploymentLayout):
    """Power sum ``T = sum_i w_i |g_i|^2 |f_i|^2``."""
    _check_n(draw, layout)
    t = np.sum(layout.w * np.abs(draw.g) ** 2 * np.abs(draw.f) ** 2, axis=-1)
    return float(t) if np.ndim(t) == 0 else t
