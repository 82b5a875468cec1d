"""Sweep configuration: TOML loading, validation, defaults and serialisation.

Example::

    [geometry]
    L = 40.0

    [model]
    sigma_delta = 0.1
    l1 = 20.0

    [grid]
    n_tags = { from = 1, to = 80, step = 1 }

    methods = ["mc", "gamma"]   # top-level keys go before any [section]
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .analytic import METHODS
from .fading import Regime
from .geometry import TunnelGeometry
from .montecarlo import McConfig

GRID_AXES = ("n_tags", "l1", "sigma_delta", "length")
OUTPUT_FORMATS = ("csv", "json")
PRESET_DIR = Path(__file__).parent / "presets"


class ConfigError(Exception):
    """Base class for configuration problems; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


class ConfigFileNotFound(ConfigError):
    pass


class ConfigSyntaxError(ConfigError):
    pass


class ConfigValidationError(ConfigError):
    pass


@dataclass(frozen=True)
class PdfConfig:
    n_tags: tuple = (2, 5, 20)
    samples: int = 100_000
    bins: int = 100


@dataclass(frozen=True)
class SweepConfig:
    geometry: TunnelGeometry = TunnelGeometry()
    alpha: float = 2.0
    eta: float = 0.5
    sigma_delta: float = 0.1
    n_tags: int = 20
    l1: float | None = None
    l1_fraction: float | None = 0.5
    grid: tuple = (("n_tags", tuple(range(1, 81))),)
    methods: tuple = ("mc", "gauss", "gamma")
    phase: str = "adjustable"
    mc: McConfig = McConfig()
    output_path: str | None = None
    output_format: str = "csv"
    timing: bool = False
    pdf: PdfConfig | None = None

    def grid_points(self):
        """Dicts of full scenario coordinates in deterministic grid order."""
        axes = [a for a, _ in self.grid]
        for combo in itertools.product(*(vals for _, vals in self.grid)):
            point = {
                "n_tags": self.n_tags,
                "length": self.geometry.L,
                "sigma_delta": self.sigma_delta,
                "l1": None,
            }
            point.update(zip(axes, combo))
            if point["l1"] is None:
                point["l1"] = self.l1 if self.l1 is not None else self.l1_fraction * point["length"]
            point["n_tags"] = int(point["n_tags"])
            yield point


_SECTION_KEYS = {
    "geometry": {"H", "W", "L", "H_t", "H_r"},
    "model": {"alpha", "eta", "sigma_delta", "n_tags", "l1", "l1_fraction"},
    "grid": set(GRID_AXES),
    "mc": {"runs", "seed", "chunk"},
    "output": {"path", "format", "timing"},
    "pdf": {"n_tags", "samples", "bins"},
}
_TOP_KEYS = {"methods", "phase"}


def _locate(text: str, section: str | None, key: str | None) -> int | None:
    """Best-effort 1-based line of ``key`` inside ``[section]``."""
    if text is None:
        return None
    current = None
    header = re.compile(r"^\s*\[([^\]]+)\]\s*(#.*)?$")
    for lineno, line in enumerate(text.splitlines(), start=1):
        m = header.match(line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if key is not None and current == section and re.match(rf"^\s*{re.escape(key)}\s*=", line):
            return lineno
    return None


def _expand_axis(axis, raw, fail):
    if isinstance(raw, list):
        values = raw
    elif isinstance(raw, dict):
        missing = {"from", "to", "step"} - raw.keys()
        if missing:
            fail(f"grid.{axis}: range needs from/to/step (missing {sorted(missing)})", "grid", axis)
        start, stop, step = raw["from"], raw["to"], raw["step"]
        if not step > 0:
            fail(f"grid.{axis}: step must be positive", "grid", axis)
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = [start + k * step for k in range(max(count, 0))]
        if all(isinstance(v, int) for v in (start, stop, step)):
            values = [int(v) for v in values]
        else:
            values = [round(float(v), 12) for v in values]
    else:
        fail(f"grid.{axis}: expected a list or a from/to/step table", "grid", axis)
    if not values:
        fail(f"grid.{axis}: axis has no values", "grid", axis)
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            fail(f"grid.{axis}: non-numeric value {v!r}", "grid", axis)
        if axis == "n_tags" and (int(v) != v or v < 0):
            fail(f"grid.n_tags: tag counts must be non-negative integers, got {v!r}", "grid", axis)
    if axis == "n_tags":
        return tuple(int(v) for v in values)
    return tuple(float(v) for v in values)


def config_from_dict(data: dict, path=None, text=None) -> SweepConfig:
    def fail(msg, section=None, key=None):
        raise ConfigValidationError(msg, path, _locate(text, section, key))

    for key, value in data.items():
        if key in _SECTION_KEYS:
            if not isinstance(value, dict):
                fail(f"[{key}] must be a table", None, key)
            unknown = set(value) - _SECTION_KEYS[key]
            if unknown:
                bad = sorted(unknown)[0]
                fail(f"unknown key {key}.{bad}", key, bad)
        elif key not in _TOP_KEYS:
            fail(f"unknown key {key!r}", None, key)

    def section(name):
        return data.get(name, {})

    def number(sec, key, default, kind=float):
        raw = section(sec).get(key, default)
        if raw is None:
            return None
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            fail(f"{sec}.{key} must be a number, got {raw!r}", sec, key)
        if kind is int:
            if int(raw) != raw:
                fail(f"{sec}.{key} must be an integer, got {raw!r}", sec, key)
            return int(raw)
        return float(raw)

    defaults = SweepConfig()
    g = defaults.geometry
    try:
        geometry = TunnelGeometry(
            H=number("geometry", "H", g.H),
            W=number("geometry", "W", g.W),
            L=number("geometry", "L", g.L),
            H_t=number("geometry", "H_t", g.H_t),
            H_r=number("geometry", "H_r", g.H_r),
        )
    except ValueError as exc:
        fail(f"geometry: {exc}", "geometry", None)

    alpha = number("model", "alpha", defaults.alpha)
    eta = number("model", "eta", defaults.eta)
    sigma_delta = number("model", "sigma_delta", defaults.sigma_delta)
    n_tags = number("model", "n_tags", defaults.n_tags, int)
    l1 = number("model", "l1", None)
    l1_fraction = number("model", "l1_fraction", None)
    if not alpha > 0:
        fail(f"model.alpha must be positive, got {alpha}", "model", "alpha")
    if not 0 < eta <= 1:
        fail(f"model.eta must lie in (0, 1], got {eta}", "model", "eta")
    if not sigma_delta >= 0:
        fail(f"model.sigma_delta must be >= 0, got {sigma_delta}", "model", "sigma_delta")
    if n_tags < 0:
        fail(f"model.n_tags must be >= 0, got {n_tags}", "model", "n_tags")
    if l1 is not None and l1_fraction is not None:
        fail("model.l1 and model.l1_fraction are mutually exclusive", "model", "l1_fraction")
    if l1_fraction is not None and not 0 <= l1_fraction <= 1:
        fail(f"model.l1_fraction must lie in [0, 1], got {l1_fraction}", "model", "l1_fraction")
    if l1 is None and l1_fraction is None:
        l1_fraction = defaults.l1_fraction

    if "grid" in data:
        grid_raw = section("grid")
        if not grid_raw:
            fail("grid is empty", "grid", None)
        grid = tuple((axis, _expand_axis(axis, raw, fail)) for axis, raw in grid_raw.items())
    else:
        grid = defaults.grid

    phase = data.get("phase", defaults.phase)
    if phase not in {r.value for r in Regime}:
        fail(f"phase must be 'adjustable' or 'random', got {phase!r}", None, "phase")
    methods = data.get("methods")
    if methods is None:
        methods = ("mc", "gauss", "gamma", "exact") if phase == "random" else defaults.methods
    if not isinstance(methods, list | tuple) or not methods:
        fail("methods must be a non-empty list", None, "methods")
    for m in methods:
        if m not in METHODS:
            fail(f"unknown method {m!r}; choose from {list(METHODS)}", None, "methods")
    if len(set(methods)) != len(methods):
        fail("methods contains duplicates", None, "methods")
    if "exact" in methods and phase != "random":
        fail("method 'exact' is only available with phase = 'random'", None, "methods")

    try:
        mc = McConfig(
            runs=number("mc", "runs", defaults.mc.runs, int),
            seed=number("mc", "seed", defaults.mc.seed, int),
            chunk=number("mc", "chunk", defaults.mc.chunk, int),
        )
    except ValueError as exc:
        fail(f"mc: {exc}", "mc", None)

    out = section("output")
    output_path = out.get("path")
    if output_path is not None and not isinstance(output_path, str):
        fail("output.path must be a string", "output", "path")
    output_format = out.get("format", defaults.output_format)
    if output_format not in OUTPUT_FORMATS:
        fail(f"output.format must be one of {list(OUTPUT_FORMATS)}, got {output_format!r}", "output", "format")
    timing = out.get("timing", False)
    if not isinstance(timing, bool):
        fail("output.timing must be true or false", "output", "timing")

    pdf = None
    if "pdf" in data:
        p = section("pdf")
        pdf_n = p.get("n_tags", list(PdfConfig.n_tags))
        if not isinstance(pdf_n, list) or not pdf_n or any(
            isinstance(v, bool) or not isinstance(v, int) or v < 1 for v in pdf_n
        ):
            fail("pdf.n_tags must be a non-empty list of positive integers", "pdf", "n_tags")
        samples = number("pdf", "samples", PdfConfig.samples, int)
        bins = number("pdf", "bins", PdfConfig.bins, int)
        if samples < 10_000:
            fail("pdf.samples must be >= 10000", "pdf", "samples")
        if bins < 1:
            fail("pdf.bins must be >= 1", "pdf", "bins")
        pdf = PdfConfig(n_tags=tuple(pdf_n), samples=samples, bins=bins)

    cfg = SweepConfig(
        geometry=geometry,
        alpha=alpha,
        eta=eta,
        sigma_delta=sigma_delta,
        n_tags=n_tags,
        l1=l1,
        l1_fraction=l1_fraction,
        grid=grid,
        methods=tuple(methods),
        phase=phase,
        mc=mc,
        output_path=output_path,
        output_format=output_format,
        timing=timing,
        pdf=pdf,
    )
    for point in cfg.grid_points():
        length = point["length"]
        if not length > 0:
            fail(f"grid point has non-positive length {length}", "grid", "length")
        if not 0 <= point["l1"] <= length:
            fail(f"grid point has l1={point['l1']} outside [0, L={length}]", "grid", "l1")
        if point["sigma_delta"] < 0:
            fail("grid.sigma_delta values must be >= 0", "grid", "sigma_delta")
    if pdf is not None and cfg.l1 is not None and cfg.l1 > geometry.L:
        fail(f"model.l1={cfg.l1} exceeds L={geometry.L}", "model", "l1")
    return cfg


def resolve_config_path(path) -> Path:
    """``path`` itself if it exists, else a bundled preset of that name."""
    p = Path(path)
    if p.exists():
        return p
    for candidate in (PRESET_DIR / p.name, PRESET_DIR / f"{p.name}.toml"):
        if candidate.exists():
            return candidate
    raise ConfigFileNotFound("config file not found", str(path))


def load_config(path) -> SweepConfig:
    p = resolve_config_path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigFileNotFound(f"cannot read config: {exc}", str(p)) from exc
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigSyntaxError(f"malformed TOML: {exc}", str(p), int(m.group(1)) if m else None) from exc
    return config_from_dict(data, path=str(p), text=text)


# --- serialisation ---------------------------------------------------------


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, list | tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {value!r}")


def dump_config(cfg: SweepConfig) -> str:
    """TOML text that :func:`load_config` parses back to an equal config."""
    lines = [f"phase = {_fmt(cfg.phase)}", f"methods = {_fmt(list(cfg.methods))}", ""]
    lines.append("[geometry]")
    for f in fields(cfg.geometry):
        lines.append(f"{f.name} = {_fmt(float(getattr(cfg.geometry, f.name)))}")
    lines += ["", "[model]"]
    lines.append(f"alpha = {_fmt(cfg.alpha)}")
    lines.append(f"eta = {_fmt(cfg.eta)}")
    lines.append(f"sigma_delta = {_fmt(cfg.sigma_delta)}")
    lines.append(f"n_tags = {_fmt(cfg.n_tags)}")
    if cfg.l1 is not None:
        lines.append(f"l1 = {_fmt(cfg.l1)}")
    else:
        lines.append(f"l1_fraction = {_fmt(cfg.l1_fraction)}")
    lines += ["", "[grid]"]
    for axis, values in cfg.grid:
        lines.append(f"{axis} = {_fmt(list(values))}")
    lines += ["", "[mc]"]
    lines.append(f"runs = {cfg.mc.runs}")
    lines.append(f"seed = {cfg.mc.seed}")
    lines.append(f"chunk = {cfg.mc.chunk}")
    lines += ["", "[output]"]
    if cfg.output_path is not None:
        lines.append(f"path = {_fmt(cfg.output_path)}")
    lines.append(f"format = {_fmt(cfg.output_format)}")
    lines.append(f"timing = {_fmt(cfg.timing)}")
    if cfg.pdf is not None:
        lines += ["", "[pdf]"]
        lines.append(f"n_tags = {_fmt(list(cfg.pdf.n_tags))}")
        lines.append(f"samples = {cfg.pdf.samples}")
        lines.append(f"bins = {cfg.pdf.bins}")
    return "\n".join(lines) + "\n"
