"""Discrete-time received signal with Doppler, CFO and residual-phase bookkeeping.

Distances are frozen for the duration of a trace; motion enters only through
the per-link Doppler rotations.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .fading import ChannelDraw
from .geometry import DeploymentLayout

SPEED_OF_LIGHT = 2.99792458e8
# rounded value used for the engineering Doppler figures (f_D ~ (v/c) f_c)
PROPAGATION_SPEED = 3.0e8


def doppler_shift(v: float, fc: float, c: float = PROPAGATION_SPEED) -> float:
    """Maximum Doppler shift ``(v/c) fc`` in Hz."""
    if v < 0:
        raise ValueError(f"speed must be >= 0, got {v}")
    if fc <= 0:
        raise ValueError(f"carrier must be positive, got {fc}")
    return v / c * fc


def residual_phase_step(eps: float, f_d: float, ts: float) -> float:
    """Per-sample phase left by an uncompensated fraction ``eps`` of ``f_d``."""
    if ts <= 0:
        raise ValueError(f"sampling interval must be positive, got {ts}")
    return 2.0 * np.pi * eps * f_d * ts


@dataclass(frozen=True)
class CarrierConfig:
    f1: float
    f2: float
    fs: float
    theta1: float = 0.0
    theta2: float = 0.0
    v: float = 0.0
    sigma_w: float = 0.0
    c: float = PROPAGATION_SPEED

    def __post_init__(self):
        if not (self.f1 > 0 and self.f2 > 0):
            raise ValueError("carrier frequencies must be positive")
        if not self.fs > 0:
            raise ValueError("sampling rate must be positive")
        if self.v < 0:
            raise ValueError("speed must be >= 0")
        if self.sigma_w < 0:
            raise ValueError("noise std must be >= 0")

    @property
    def ts(self) -> float:
        return 1.0 / self.fs

    @property
    def cfo(self) -> float:
        return self.f1 - self.f2

    @property
    def phase_error(self) -> float:
        return self.theta1 - self.theta2

    @property
    def eps_f(self) -> float:
        return self.cfo / self.fs

    @property
    def direct_doppler(self) -> float:
        return doppler_shift(self.v, self.f1, self.c)


def tag_dopplers(layout: DeploymentLayout, carrier: CarrierConfig) -> np.ndarray:
    """Per-tag Doppler ``(v/c) f1 cos(theta_i)`` in Hz.

    ``theta_i`` is the angle between the direction of travel (+axial) and the
    ray from the receiver to tag ``i``; approaching a tag gives a positive shift.
    """
    cos_theta = (np.asarray(layout.positions) - layout.l1) / np.asarray(layout.d_g)
    return carrier.direct_doppler * cos_theta


@dataclass(frozen=True)
class SignalTrace:
    samples: np.ndarray
    tag_data: np.ndarray
    pilot: np.ndarray
    fs: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.samples)
        if len(self.tag_data) != n or len(self.pilot) != n:
            raise ValueError("samples, tag_data and pilot must have equal length")
        if not np.all(np.abs(self.tag_data) == 1):
            raise ValueError("tag data must be +-1")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "re", "im"])
        for k, y in enumerate(self.samples):
            writer.writerow([k, f"{y.real:.12g}", f"{y.imag:.12g}"])
        return buf.getvalue()


def alternating_tag_data(n_samples: int) -> np.ndarray:
    return np.where(np.arange(n_samples) % 2 == 0, 1.0, -1.0)


def synthesize(
    layout: DeploymentLayout,
    carrier: CarrierConfig,
    draw: ChannelDraw,
    phases,
    n_samples: int,
    pilot=None,
    tag_data=None,
    rng: np.random.Generator | None = None,
) -> SignalTrace:
    """Sampled baseband signal after demodulation with the local carrier.

    ``y(n) = [eta sum_i g_i f_i e^{j(2 pi eps_D_i n + phi_i)} / c_i * x(n)
    + h e^{j 2 pi eps_d n} / d_h^(alpha/2)] s(n) e^{j(2 pi eps_f n + dtheta)} + w(n)``
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    f = np.asarray(draw.f, dtype=np.complex128)
    g = np.asarray(draw.g, dtype=np.complex128)
    phases = np.asarray(phases, dtype=np.float64)
    if f.shape != (layout.n_tags,) or g.shape != f.shape or phases.shape != f.shape:
        raise ValueError(
            f"dimension mismatch: layout has {layout.n_tags} tags, "
            f"got f{f.shape}, g{g.shape}, phases{phases.shape}"
        )
    pilot = np.ones(n_samples, dtype=np.complex128) if pilot is None else np.asarray(pilot, dtype=np.complex128)
    tag_data = alternating_tag_data(n_samples) if tag_data is None else np.asarray(tag_data, dtype=np.float64)
    if len(pilot) != n_samples or len(tag_data) != n_samples:
        raise ValueError("pilot and tag_data must have n_samples entries")
    if carrier.sigma_w > 0 and rng is None:
        raise ValueError("an rng is required when sigma_w > 0")

    n = np.arange(n_samples, dtype=np.float64)
    eps_d = carrier.direct_doppler / carrier.fs
    eps_tags = tag_dopplers(layout, carrier) / carrier.fs
    common = np.exp(1j * (2.0 * np.pi * carrier.eps_f * n + carrier.phase_error))

    coeff = layout.eta * g * f * np.exp(1j * phases) / layout.c
    back = np.exp(2j * np.pi * np.outer(n, eps_tags)) @ coeff
    direct = draw.h * np.exp(2j * np.pi * eps_d * n) / layout.d_h ** (layout.alpha / 2)
    y = (back * tag_data + direct) * pilot * common
    if carrier.sigma_w > 0:
        y = y + carrier.sigma_w * (rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples))
    meta = {
        "eps_f": carrier.eps_f,
        "eps_d": eps_d,
        "eps_D": eps_tags,
        "phase_error": carrier.phase_error,
    }
    return SignalTrace(samples=y, tag_data=tag_data, pilot=pilot, fs=carrier.fs, meta=meta)


def estimate_phase_slope(trace: SignalTrace) -> float:
    """Pilot-aided frequency estimate in Hz from the slope of the unwrapped phase.

    Unambiguous only while the true rotation stays below ``fs/2``.
    """
    if len(trace.samples) < 2:
        raise ValueError("need at least two samples")
    phase = np.unwrap(np.angle(trace.samples / trace.pilot))
    slope = np.polyfit(np.arange(len(phase)), phase, 1)[0]
    return slope * trace.fs / (2.0 * np.pi)


@dataclass(frozen=True)
class ResidualReport:
    residual: np.ndarray
    phase: np.ndarray
    mean_phase: float
    std_phase: float
    step: float


def compensate(trace: SignalTrace, estimated_cfo: float, estimated_doppler: float) -> ResidualReport:
    """Remove the estimated CFO and direct-link Doppler (both in Hz).

    The report treats the mean of the unwrapped residual phase as the common
    component and its spread as the per-sample perturbation; ``step`` is the
    mean phase advance per sample.
    """
    if len(trace.samples) == 0:
        raise ValueError("empty trace")
    n = np.arange(len(trace.samples), dtype=np.float64)
    eps = (estimated_cfo + estimated_doppler) / trace.fs
    residual = trace.samples / trace.pilot * np.exp(-2j * np.pi * eps * n)
    phase = np.unwrap(np.angle(residual))
    step = float(np.mean(np.diff(phase))) if len(phase) > 1 else 0.0
    return ResidualReport(
        residual=residual,
        phase=phase,
        mean_phase=float(np.mean(phase)),
        std_phase=float(np.std(phase)),
        step=step,
    )
