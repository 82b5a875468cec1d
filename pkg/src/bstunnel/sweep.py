"""Grid evaluation and table output for the figure-reproduction presets."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

from .analytic import (
    adjustable_moments,
    p_adjustable_gamma,
    p_adjustable_gauss,
    p_random_exact,
    p_random_gamma,
    p_random_gauss_delta,
    random_moments,
)
from .config import SweepConfig
from .fading import PhasePolicy, Regime
from .geometry import build_layout
from .montecarlo import (
    GaussianRef,
    McConfig,
    default_workers,
    estimate_p,
    fit_and_compare,
    sample_Ga,
)
from .specfun import gamma_moment_match


@dataclass(frozen=True)
class ResultRow:
    phase: str
    method: str
    n_tags: int
    l1: float
    length: float
    sigma_delta: float
    eta: float
    alpha: float
    value: float
    stderr: float | None
    wall_time_ms: float | None


RESULT_FIELDS = tuple(f.name for f in fields(ResultRow))


def evaluate(layout, phase: str, method: str, sigma_delta: float, mc: McConfig):
    """One estimate of P(N) for a built layout; MC runs single-threaded here."""
    regime = Regime(phase)
    if method == "mc":
        return estimate_p(layout, PhasePolicy(regime, sigma_delta), mc, workers=1)
    if regime is Regime.ADJUSTABLE:
        moments = adjustable_moments(layout, sigma_delta)
        if method == "gauss":
            return p_adjustable_gauss(moments, layout.c_const)
        if method == "gamma":
            return p_adjustable_gamma(moments, layout.c_const)
        raise ValueError(f"method {method!r} is not available for adjustable phases")
    moments = random_moments(layout)
    if method == "gauss":
        return p_random_gauss_delta(moments, layout.c_const)
    if method == "gamma":
        return p_random_gamma(moments, layout.c_const)
    if method == "exact":
        return p_random_exact(layout)
    raise ValueError(f"unknown method {method!r}")


def _point_rows(cfg: SweepConfig, point: dict):
    geom = cfg.geometry.with_length(point["length"])
    layout = build_layout(geom, point["n_tags"], point["l1"], cfg.alpha, cfg.eta)
    rows = []
    for method in cfg.methods:
        t0 = time.perf_counter()
        est = evaluate(layout, cfg.phase, method, point["sigma_delta"], cfg.mc)
        elapsed = (time.perf_counter() - t0) * 1e3
        rows.append(
            ResultRow(
                phase=cfg.phase,
                method=method,
                n_tags=point["n_tags"],
                l1=point["l1"],
                length=point["length"],
                sigma_delta=point["sigma_delta"],
                eta=cfg.eta,
                alpha=cfg.alpha,
                value=est.value,
                stderr=est.stderr,
                wall_time_ms=elapsed if cfg.timing else None,
            )
        )
    return rows


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> list[ResultRow]:
    """Rows for every (grid point x method), in grid order regardless of scheduling."""
    if cfg.pdf is not None:
        raise ValueError("this config describes a distribution table; use pdf_table")
    points = list(cfg.grid_points())
    workers = default_workers() if workers is None else workers
    if workers <= 1:
        chunks = [_point_rows(cfg, p) for p in points]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda p: _point_rows(cfg, p), points))
    return [row for chunk in chunks for row in chunk]


# --- distribution table ----------------------------------------------------

PDF_FIELDS = ("n_tags", "quantity", "bin_left", "bin_right", "density", "reference_pdf", "ks")


def pdf_table(
    geom,
    l1: float,
    sigma_delta: float,
    n_tags_list,
    samples: int,
    bins: int,
    seed: int = 0,
    alpha: float = 2.0,
    eta: float = 0.5,
    chunk: int = 32_768,
):
    """Histogram rows of ``Re G_a`` against its Gaussian fit and of ``|G_a|^2``
    against the moment-matched Gamma, plus the KS distance of each fit."""
    rows = []
    for n in n_tags_list:
        layout = build_layout(geom, n, l1, alpha, eta)
        mom = adjustable_moments(layout, sigma_delta)
        ga = sample_Ga(layout, sigma_delta, McConfig(runs=samples, seed=seed, chunk=chunk), workers=1)
        mean_z = mom.mu_G**2 + mom.sigma2_G
        var_z = 2.0 * mom.sigma2_G**2 + 4.0 * mom.sigma2_G * mom.mu_G**2
        fits = (
            ("ga_real", ga.real, GaussianRef(mom.mu_G, math.sqrt(mom.sigma2_G))),
            ("ga_sq", abs(ga) ** 2, gamma_moment_match(mean_z, var_z)),
        )
        for name, data, ref in fits:
            rep = fit_and_compare(data, ref, bins)
            heights = rep.histogram.values
            for k in range(len(heights)):
                rows.append(
                    {
                        "n_tags": n,
                        "quantity": name,
                        "bin_left": float(rep.histogram.edges[k]),
                        "bin_right": float(rep.histogram.edges[k + 1]),
                        "density": float(heights[k]),
                        "reference_pdf": float(rep.reference_pdf[k]),
                        "ks": rep.ks,
                    }
                )
    return rows


# --- output ----------------------------------------------------------------


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _json_value(v):
    if isinstance(v, float):
        return float(f"{v:.12g}")
    return v


def render(rows, fmt: str = "csv", header=RESULT_FIELDS) -> str:
    dicts = [r if isinstance(r, dict) else {k: getattr(r, k) for k in header} for r in rows]
    if fmt == "json":
        payload = [{k: _json_value(d[k]) for k in header} for d in dicts]
        return json.dumps(payload, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for d in dicts:
        writer.writerow([_cell(d[k]) for k in header])
    return buf.getvalue()


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
