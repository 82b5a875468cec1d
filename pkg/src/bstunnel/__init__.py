"""Backscatter-assisted links in straight rail tunnels: P(N) by simulation and closed forms."""

from .analytic import (
    AdjustableMoments,
    ProbabilityEstimate,
    RandomMoments,
    adjustable_moments,
    p_adjustable_gamma,
    p_adjustable_gauss,
    p_random_exact,
    p_random_gamma,
    p_random_gauss_delta,
    random_moments,
)
from .fading import PhasePolicy, Regime
from .geometry import DeploymentLayout, TunnelGeometry, build_layout, tag_position
from .kernels import BACKEND
from .montecarlo import McConfig, estimate_p

__version__ = "0.1.0"
