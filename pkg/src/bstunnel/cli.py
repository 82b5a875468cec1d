"""Command-line front end: ``prob``, ``sweep``, ``pdf``, ``doppler``, ``baseband``.

Exit codes: 0 success, 2 configuration or argument error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys

import numpy as np

from . import baseband
from .config import ConfigError, load_config
from .fading import PhasePolicy, Regime, sample_channels
from .geometry import TunnelGeometry, build_layout
from .montecarlo import McConfig, chunk_stream
from .sweep import PDF_FIELDS, evaluate, pdf_table, render, run_sweep, write_atomic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_UNIT = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([A-Za-z/]*)\s*$")

SPEED_UNITS = {"": 1.0, "m/s": 1.0, "mps": 1.0, "kmh": 1 / 3.6, "km/h": 1 / 3.6}
FREQ_UNITS = {"": 1.0, "hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9}
TIME_UNITS = {"": 1.0, "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9}


def parse_quantity(text: str, units: dict) -> float:
    """``"350kmh"`` -> 97.22..., ``"1.8GHz"`` -> 1.8e9, ``"1ms"`` -> 1e-3."""
    m = _UNIT.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse quantity {text!r}")
    value, unit = float(m.group(1)), m.group(2).lower()
    if unit not in units:
        raise argparse.ArgumentTypeError(f"unknown unit {m.group(2)!r}; expected one of {sorted(units)}")
    return value * units[unit]


# name -> (f1, carrier offset Hz, theta1, theta2, speed m/s, fs, n_tags, residual fraction)
BASEBAND_PRESETS = {
    "static": (1.8e9, 0.0, 0.0, 0.0, 0.0, 1e3, 0, 0.0),
    "hsr-1.8ghz": (1.8e9, 25.0, 0.4, 0.1, 350 / 3.6, 1e3, 0, 0.01),
    "hsr-2.1ghz": (2.1e9, 25.0, 0.4, 0.1, 350 / 3.6, 1e3, 0, 0.01),
    "hsr-3.5ghz": (3.5e9, 25.0, 0.4, 0.1, 350 / 3.6, 1e3, 0, 0.01),
    "hsr-2.1ghz-10pct": (2.1e9, 25.0, 0.4, 0.1, 350 / 3.6, 1e3, 0, 0.10),
    "hsr-1.8ghz-tags": (1.8e9, 25.0, 0.4, 0.1, 350 / 3.6, 1e3, 20, 0.01),
}


def _add_scenario_args(p):
    p.add_argument("--n", type=int, required=True, help="number of tags")
    p.add_argument("--l1", type=float, default=None, help="Rx offset from the entrance, m (default L/2)")
    p.add_argument("--length", type=float, default=40.0, help="tunnel length, m")
    p.add_argument("--sigma-delta", type=float, default=0.1, help="residual phase std, rad")
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=2.0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bstunnel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prob", help="single P(N) estimate as JSON")
    p.add_argument("--phase", choices=[r.value for r in Regime], required=True)
    p.add_argument("--method", choices=["mc", "gauss", "gamma", "exact"], required=True)
    _add_scenario_args(p)
    p.add_argument("--runs", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chunk", type=int, default=32_768)

    p = sub.add_parser("sweep", help="evaluate a config grid and write a table")
    p.add_argument("--config", required=True, help="TOML path or preset name (fig2..fig5)")
    p.add_argument("--out", default=None, help="output path (overrides the config)")
    p.add_argument("--workers", type=int, default=None, help="thread count (default $BSTUNNEL_THREADS or 1)")

    p = sub.add_parser("pdf", help="histograms of G_a and |G_a|^2 against their fits")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--bins", type=int, default=100)
    p.add_argument("--sigma-delta", type=float, default=0.1)
    p.add_argument("--l1", type=float, default=None)
    p.add_argument("--length", type=float, default=40.0)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)

    p = sub.add_parser("doppler", help="Doppler and residual phase arithmetic")
    p.add_argument("--speed", type=lambda s: parse_quantity(s, SPEED_UNITS), required=True)
    p.add_argument("--fc", type=lambda s: parse_quantity(s, FREQ_UNITS), required=True)
    p.add_argument("--ts", type=lambda s: parse_quantity(s, TIME_UNITS), default=1e-3)
    p.add_argument("--eps", type=float, default=0.01)

    p = sub.add_parser("baseband", help="synthesise a trace and report residual phase")
    p.add_argument("--preset", choices=sorted(BASEBAND_PRESETS), required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="trace CSV path (default: trace not written)")
    return parser


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        write_atomic(out, text)


def cmd_prob(args):
    geom = TunnelGeometry(L=args.length)
    l1 = args.length / 2 if args.l1 is None else args.l1
    layout = build_layout(geom, args.n, l1, args.alpha, args.eta)
    if args.method == "exact" and args.phase != "random":
        raise ValueError("method 'exact' is only available with --phase random")
    mc = McConfig(runs=args.runs, seed=args.seed, chunk=args.chunk)
    est = evaluate(layout, args.phase, args.method, args.sigma_delta, mc)
    report = {
        "phase": args.phase,
        "method": est.method,
        "n_tags": args.n,
        "l1": l1,
        "length": args.length,
        "sigma_delta": args.sigma_delta,
        "eta": args.eta,
        "alpha": args.alpha,
        "value": est.value,
        "stderr": est.stderr,
        "runs": est.runs,
        "seed": est.seed,
    }
    print(json.dumps(report))


def cmd_sweep(args):
    cfg = load_config(args.config)
    out = args.out if args.out is not None else cfg.output_path
    if cfg.pdf is not None:
        l1 = cfg.l1 if cfg.l1 is not None else cfg.l1_fraction * cfg.geometry.L
        rows = pdf_table(
            cfg.geometry, l1, cfg.sigma_delta, cfg.pdf.n_tags, cfg.pdf.samples, cfg.pdf.bins,
            seed=cfg.mc.seed, alpha=cfg.alpha, eta=cfg.eta, chunk=cfg.mc.chunk,
        )
        _emit(render(rows, cfg.output_format, PDF_FIELDS), out)
        return
    rows = run_sweep(cfg, workers=args.workers)
    _emit(render(rows, cfg.output_format), out)


def cmd_pdf(args):
    geom = TunnelGeometry(L=args.length)
    l1 = args.length / 2 if args.l1 is None else args.l1
    rows = pdf_table(geom, l1, args.sigma_delta, [args.n], args.samples, args.bins,
                     seed=args.seed, alpha=args.alpha, eta=args.eta)
    for name in ("ga_real", "ga_sq"):
        ks = next(r["ks"] for r in rows if r["quantity"] == name)
        print(f"ks[{name}] = {ks:.6f}", file=sys.stderr)
    _emit(render(rows, "csv", PDF_FIELDS), args.out)


def cmd_doppler(args):
    f_d = baseband.doppler_shift(args.speed, args.fc)
    delta = baseband.residual_phase_step(args.eps, f_d, args.ts)
    print(f"speed_mps = {args.speed:.6g}")
    print(f"carrier_hz = {args.fc:.6g}")
    print(f"doppler_hz = {f_d:.6g}")
    print(f"ts_s = {args.ts:.6g}")
    print(f"eps = {args.eps:.6g}")
    print(f"residual_phase_rad = {delta:.6g}")


def cmd_baseband(args):
    f1, offset, th1, th2, v, fs, n_tags, residual = BASEBAND_PRESETS[args.preset]
    carrier = baseband.CarrierConfig(f1=f1, f2=f1 - offset, fs=fs, theta1=th1, theta2=th2, v=v)
    layout = build_layout(TunnelGeometry(), n_tags, 20.0)
    rng = chunk_stream(args.seed, 0)
    draw = sample_channels(rng, n_tags)
    phases = np.mod(-np.angle(draw.g * draw.f), 2 * np.pi) if n_tags else np.zeros(0)
    trace = baseband.synthesize(layout, carrier, draw, phases, args.samples, rng=rng)
    est_doppler = (1.0 - residual) * carrier.direct_doppler
    rep = baseband.compensate(trace, carrier.cfo, est_doppler)
    expected = baseband.residual_phase_step(residual, carrier.direct_doppler, carrier.ts)
    if args.out is not None:
        write_atomic(args.out, trace.to_csv())
    print(json.dumps({
        "preset": args.preset,
        "samples": args.samples,
        "doppler_hz": carrier.direct_doppler,
        "cfo_hz": carrier.cfo,
        "residual_fraction": residual,
        "expected_step_rad": expected,
        "measured_step_rad": rep.step,
        "mean_phase_rad": rep.mean_phase,
        "std_phase_rad": rep.std_phase,
    }))


COMMANDS = {
    "prob": cmd_prob,
    "sweep": cmd_sweep,
    "pdf": cmd_pdf,
    "doppler": cmd_doppler,
    "baseband": cmd_baseband,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
