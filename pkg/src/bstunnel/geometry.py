"""Straight-tunnel deployment: tag placement, link distances and path-loss weights.

Tags sit on the ceiling centreline at equal spacing ``L/(N+1)``; the Tx is at
the tunnel entrance (axial coordinate 0) and the Rx rides on the train roof at
axial offset ``l1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TunnelGeometry:
    """Tunnel and antenna dimensions, all in metres."""

    H: float = 5.3
    W: float = 4.8
    L: float = 40.0
    H_t: float = 4.9
    H_r: float = 3.4

    def __post_init__(self):
        for name in ("H", "W", "L", "H_t", "H_r"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if not self.H_r < self.H_t < self.H:
            raise ValueError(
                f"need 0 < H_r < H_t < H, got H_r={self.H_r}, H_t={self.H_t}, H={self.H}"
            )

    def with_length(self, length: float) -> "TunnelGeometry":
        return TunnelGeometry(self.H, self.W, length, self.H_t, self.H_r)


def _frozen(a):
    a = np.asarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DeploymentLayout:
    """Per-tag distances and weights for one receiver position.

    ``c[i] = sqrt(d_g^alpha d_f^alpha)`` is the backscatter amplitude divisor and
    ``w[i] = 1/c[i]^2`` the matching power weight.  ``c_const = d_h^alpha eta^2``
    is the threshold scale that turns the metric into
    ``c_const * |A_r|^2 >= |h|^2``.
    """

    n_tags: int
    l1: float
    alpha: float
    eta: float
    d_h: float
    d_f: np.ndarray = field(repr=False)
    d_g: np.ndarray = field(repr=False)
    c: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    c0: float
    c_const: float
    positions: np.ndarray = field(repr=False)


def tag_position(i: int, n_tags: int, length: float) -> float:
    """Axial coordinate of tag ``i`` (1-based) among ``n_tags`` equally spaced tags."""
    if length <= 0:
        raise ValueError(f"tunnel length must be positive, got {length}")
    if not 1 <= i <= n_tags:
        raise IndexError(f"tag index {i} out of range 1..{n_tags}")
    return i * length / (n_tags + 1)


def build_layout(
    geom: TunnelGeometry,
    n_tags: int,
    l1: float,
    alpha: float = 2.0,
    eta: float = 0.5,
) -> DeploymentLayout:
    if int(n_tags) != n_tags or n_tags < 0:
        raise ValueError(f"n_tags must be a non-negative integer, got {n_tags!r}")
    n_tags = int(n_tags)
    if not 0 <= l1 <= geom.L:
        raise ValueError(f"l1 must lie in [0, L={geom.L}], got {l1}")
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 0 <= eta <= 1:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")

    positions = np.arange(1, n_tags + 1, dtype=np.float64) * geom.L / (n_tags + 1)
    d_f = np.sqrt((geom.H - geom.H_t) ** 2 + positions**2)
    d_g = np.sqrt((geom.H - geom.H_r) ** 2 + (l1 - positions) ** 2)
    d_h = float(np.sqrt((geom.H_t - geom.H_r) ** 2 + l1**2))
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        c = np.sqrt(d_g**alpha * d_f**alpha)
        w = 1.0 / (d_g**alpha * d_f**alpha)
        c0 = d_h ** (alpha / 2) * eta
        c_const = c0 * c0
    weights_ok = np.all(np.isfinite(c) & (c > 0) & np.isfinite(w) & (w > 0))
    if not (weights_ok and np.isfinite(c_const)):
        raise FloatingPointError(f"path-loss weights overflow double precision at alpha={alpha}")
    return DeploymentLayout(
        n_tags=n_tags,
        l1=float(l1),
        alpha=float(alpha),
        eta=float(eta),
        d_h=d_h,
        d_f=_frozen(d_f),
        d_g=_frozen(d_g),
        c=_frozen(c),
        w=_frozen(w),
        c0=float(c0),
        c_const=float(c_const),
        positions=_frozen(positions),
    )
