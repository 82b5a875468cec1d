"""Monte Carlo estimation of P(N) and sampling of the coherent sum G_a.

Trials are split into chunks of ``McConfig.chunk`` runs; chunk ``j`` draws from
a Philox generator keyed by ``SeedSequence(seed, spawn_key=(j,))``.  The
success count is an integer sum over chunks, so results do not depend on how
many worker threads evaluate the chunks.

Amplitudes are drawn as ``|g|^2, |f|^2 ~ Exp(1)``, which is the law of the
squared modulus of a CN(0, 1) coefficient; the channel phases only enter via
the tag phase policy and are handled there.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import kernels
from .analytic import ProbabilityEstimate
from .fading import TWO_PI, PhasePolicy, Regime
from .geometry import DeploymentLayout
from .specfun import GammaParams, gamma_pdf, gaussian_pdf

THREADS_ENV = "BSTUNNEL_THREADS"
MIN_FIT_SAMPLES = 10_000


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


@dataclass(frozen=True)
class McConfig:
    runs: int = 100_000
    seed: int = 0
    chunk: int = 32_768

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.chunk < 1:
            raise ValueError(f"chunk must be >= 1, got {self.chunk}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def chunk_sizes(self):
        full, rest = divmod(self.runs, self.chunk)
        return [self.chunk] * full + ([rest] if rest else [])


def chunk_stream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for chunk ``index`` of the run seeded by ``seed``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _map_chunks(fn, mc: McConfig, workers: int | None):
    jobs = list(enumerate(mc.chunk_sizes()))
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        return [fn(j, m) for j, m in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def _chunk_hits(layout: DeploymentLayout, policy: PhasePolicy, seed: int, index: int, m: int) -> int:
    rng = chunk_stream(seed, index)
    n = layout.n_tags
    x2 = rng.standard_exponential((m, n))
    y2 = rng.standard_exponential((m, n))
    if policy.regime is Regime.RANDOM:
        phase = rng.uniform(0.0, TWO_PI, (m, n))
        use_phase = True
    elif policy.sigma_delta > 0:
        phase = rng.normal(0.0, policy.sigma_delta, (m, n))
        use_phase = True
    else:
        phase = None
        use_phase = False
    h2 = rng.standard_exponential(m)
    inv_c = np.ascontiguousarray(1.0 / layout.c)
    return kernels.count_hits(x2, y2, phase, h2, inv_c, layout.c_const, use_phase)


def estimate_p(
    layout: DeploymentLayout,
    policy: PhasePolicy,
    mc: McConfig = McConfig(),
    workers: int | None = None,
) -> ProbabilityEstimate:
    """Fraction of trials with ``eta^2 |A_r|^2 >= |A_0|^2`` and its binomial stderr."""
    if layout.n_tags == 0 or layout.c_const == 0:
        hits = 0
    else:
        counts = _map_chunks(
            lambda j, m: _chunk_hits(layout, policy, mc.seed, j, m), mc, workers
        )
        hits = sum(counts)
    p = hits / mc.runs
    stderr = math.sqrt(p * (1.0 - p) / mc.runs)
    return ProbabilityEstimate(p, "mc", stderr=stderr, runs=mc.runs, seed=mc.seed)


def estimate_p_power_sum(layout: DeploymentLayout, mc: McConfig = McConfig(), workers: int | None = None):
    """Random-phase P(N) simulated through the power sum ``T``.

    Draws ``X_i, Y_i ~ Exp(1)`` for ``|g_i|^2, |f_i|^2``, sets the backscatter
    power to ``T E`` with ``E ~ Exp(1)`` (a Rayleigh envelope given ``T``) and
    compares against ``|h|^2 ~ Exp(1)``.  This is the reduction the exact
    integral evaluates, so it checks the quadrature rather than the reduction.
    """
    if layout.n_tags == 0 or layout.c_const == 0:
        hits = 0
    else:
        w = np.asarray(layout.w)

        def chunk(j, m):
            rng = chunk_stream(mc.seed, j)
            n = layout.n_tags
            t = (rng.standard_exponential((m, n)) * rng.standard_exponential((m, n))) @ w
            v = t * rng.standard_exponential(m)
            h2 = rng.standard_exponential(m)
            return int(np.count_nonzero(layout.c_const * v >= h2))

        hits = sum(_map_chunks(chunk, mc, workers))
    p = hits / mc.runs
    return ProbabilityEstimate(p, "mc", stderr=math.sqrt(p * (1.0 - p) / mc.runs), runs=mc.runs, seed=mc.seed)


def sample_Ga(layout: DeploymentLayout, sigma_delta: float, mc: McConfig, workers: int | None = None):
    """Samples of ``G_a = sum_i a_i e^{j delta_i}`` under coherent phase control."""
    inv_c = 1.0 / layout.c

    def chunk(j, m):
        rng = chunk_stream(mc.seed, j)
        n = layout.n_tags
        a = np.sqrt(rng.standard_exponential((m, n)) * rng.standard_exponential((m, n))) * inv_c
        if sigma_delta > 0:
            return np.sum(a * np.exp(1j * rng.normal(0.0, sigma_delta, (m, n))), axis=1)
        return np.sum(a, axis=1).astype(np.complex128)

    return np.concatenate(_map_chunks(chunk, mc, workers))


def sample_Ga_sq(layout: DeploymentLayout, sigma_delta: float, mc: McConfig, workers: int | None = None):
    return np.abs(sample_Ga(layout, sigma_delta, mc, workers)) ** 2


# --- distribution comparison -----------------------------------------------


@dataclass(frozen=True)
class GaussianRef:
    mean: float
    std: float


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray
    density: bool = True

    def __post_init__(self):
        if len(self.counts) != len(self.edges) - 1:
            raise ValueError("counts must have one entry fewer than edges")

    @property
    def centers(self):
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def values(self):
        """Bin heights: densities when ``density`` is set, raw counts otherwise."""
        if not self.density:
            return self.counts.astype(np.float64)
        return self.counts / (self.counts.sum() * np.diff(self.edges))


@dataclass(frozen=True)
class CompareReport:
    histogram: Histogram
    reference_pdf: np.ndarray
    ks: float
    n: int


def _reference_cdf(reference):
    if isinstance(reference, GammaParams):
        return stats.gamma(reference.k, scale=reference.theta).cdf
    if isinstance(reference, GaussianRef):
        return stats.norm(reference.mean, reference.std).cdf
    raise TypeError(f"unsupported reference {reference!r}")


def _reference_pdf(reference, x):
    if isinstance(reference, GammaParams):
        return gamma_pdf(reference, x)
    return gaussian_pdf(reference.mean, reference.std, x)


def fit_and_compare(samples, reference, bins: int = 100) -> CompareReport:
    """Histogram ``samples``, evaluate ``reference`` at bin centres, and report
    the Kolmogorov-Smirnov distance between the sample and the reference."""
    samples = np.asarray(samples, dtype=np.float64).ravel()
    if samples.size < MIN_FIT_SAMPLES:
        raise ValueError(f"need at least {MIN_FIT_SAMPLES} samples, got {samples.size}")
    counts, edges = np.histogram(samples, bins=bins)
    hist = Histogram(edges=edges, counts=counts, density=True)
    ks = float(stats.kstest(samples, _reference_cdf(reference)).statistic)
    return CompareReport(hist, np.asarray(_reference_pdf(reference, hist.centers)), ks, samples.size)
