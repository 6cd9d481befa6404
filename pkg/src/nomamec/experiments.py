"""Config-driven parameter sweeps with CSV and SVG output.

Experiment files are TOML::

    schema_version = 1
    name = "fig3"

    [network]            # SI keys, or convenience suffixes: _ms _ghz _mhz _kbits _mw
    deadline_ms = 10
    f_user_ghz = 0.5
    ...

    [sweep]
    variable = "p_total"  # task_bits | p_total | f_user | ratio_n | rho (suffix forms allowed)
    values = [0.1, 1.0, 10.0]
    pin_t1 = false        # hold the proposed scheme's t1 at the base optimum

    [[schemes]]
    kind = "proposed"     # optional: beta = 0.85, lambda = 0.3

    [mc]                  # optional
    n = 100000
    seed = 7

    [output]
    csv = "fig3.csv"
    plot = "fig3.svg"     # optional

Parsing normalizes everything to SI; :func:`dump_config` writes that
normalized form back, and parsing the dump reproduces the same run.
"""
from __future__ import annotations

import csv
import io
import math
import sys
from dataclasses import dataclass, fields, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import tomli_w

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, InfeasibleDeadline
from .model import NetworkConfig
from .montecarlo import PsEstimate
from .optimizer import theorem1_allocation
from .schemes import MonteCarlo, SchemeKind, SchemeSpec, plan_ps, scheme_plan

SCHEMA_VERSION = 1
CSV_HEADER = (
    "sweep_var", "sweep_value", "scheme", "ps_analytic", "ps_mc", "stderr",
    "t1", "t2", "beta_a", "beta_b", "lambda", "latency",
)
SWEEP_VARIABLES = ("task_bits", "p_total", "f_user", "ratio_n", "rho")
MIN_MC_SAMPLES = 1000
PRESETS = ("fig2", "fig3", "fig4")

_UNIT_SUFFIXES = {
    "_ms": 1e-3,
    "_ghz": 1e9,
    "_mhz": 1e6,
    "_khz": 1e3,
    "_kbits": 1e3,
    "_mw": 1e-3,
}
_SUFFIX_BASE = {"task_kbits": "task_bits"}
_NETWORK_FIELDS = {f.name for f in fields(NetworkConfig)}


def _normalize_key(key: str, value, where: str) -> tuple[str, float]:
    if key in _NETWORK_FIELDS or key == "rho":
        return key, float(value)
    if key in _SUFFIX_BASE:
        return _SUFFIX_BASE[key], float(value) * _UNIT_SUFFIXES["_kbits"]
    for suffix, factor in _UNIT_SUFFIXES.items():
        if key.endswith(suffix) and key[: -len(suffix)] in _NETWORK_FIELDS:
            return key[: -len(suffix)], float(value) * factor
    raise ConfigError(f"{where}: unknown key {key!r}")


def parse_network(table: dict, where: str = "network") -> NetworkConfig:
    """Build a :class:`NetworkConfig` from a table that may use unit-suffixed keys."""
    if not isinstance(table, dict):
        raise ConfigError(f"{where} must be a table")
    values: dict[str, float] = {}
    for key, raw in table.items():
        try:
            name, value = _normalize_key(key, raw, where)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{where}.{key}: expected a number, got {raw!r}") from None
        if name in values:
            raise ConfigError(f"{where}: {name!r} given more than once (key {key!r})")
        values[name] = value
    rho = values.pop("rho", None)
    if rho is not None:
        if "p_total" in values:
            raise ConfigError(f"{where}: give either rho or p_total, not both")
        values["p_total"] = rho * values.get("sigma2", NetworkConfig.sigma2)
    try:
        return NetworkConfig(**values)
    except ConfigError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def apply_sweep(base: NetworkConfig, variable: str, value: float) -> NetworkConfig:
    if variable == "rho":
        return base.with_rho(value)
    return base.replace(**{variable: value})


@dataclass(frozen=True)
class McSettings:
    n: int
    seed: int
    workers: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    base: NetworkConfig
    sweep_var: str
    sweep_values: tuple[float, ...]
    schemes: tuple[SchemeSpec, ...]
    csv_path: Optional[str] = None
    plot_path: Optional[str] = None
    mc: Optional[McSettings] = None
    pin_t1: bool = False
    name: str = "experiment"
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.sweep_var not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}, got {self.sweep_var!r}")
        if not self.sweep_values:
            raise ConfigError("sweep.values must not be empty")
        if any(b <= a for a, b in zip(self.sweep_values, self.sweep_values[1:])):
            raise ConfigError("sweep.values must be strictly increasing")
        if not self.schemes:
            raise ConfigError("schemes: at least one scheme is required")
        if len({s.label for s in self.schemes}) != len(self.schemes):
            raise ConfigError("schemes: duplicate entries")
        if self.mc is not None and self.mc.n < MIN_MC_SAMPLES:
            raise ConfigError(f"mc.n must be >= {MIN_MC_SAMPLES}, got {self.mc.n}")
        if self.pin_t1 and self.base.local_feasible:
            raise ConfigError("sweep.pin_t1 needs a base scenario whose tasks do not fit locally")


def parse_config(data: dict) -> ExperimentConfig:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")
    unknown = set(data) - {"schema_version", "name", "network", "sweep", "schemes", "mc", "output"}
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    base = parse_network(data.get("network", {}))

    sweep = data.get("sweep")
    if not isinstance(sweep, dict) or "variable" not in sweep or "values" not in sweep:
        raise ConfigError("sweep: needs 'variable' and 'values'")
    extra = set(sweep) - {"variable", "values", "pin_t1"}
    if extra:
        raise ConfigError(f"sweep: unknown keys {sorted(extra)}")
    raw_var = sweep["variable"]
    if raw_var == "rho":
        var, factor = "rho", 1.0
    else:
        try:
            var, factor = _normalize_key(raw_var, 1.0, "sweep.variable")
        except ConfigError:
            raise ConfigError(f"sweep.variable must be one of {SWEEP_VARIABLES}, got {raw_var!r}") from None
    try:
        values = tuple(float(v) * factor for v in sweep["values"])
    except (TypeError, ValueError):
        raise ConfigError("sweep.values must be a list of numbers") from None

    schemes_raw = data.get("schemes", [])
    if not isinstance(schemes_raw, list):
        raise ConfigError("schemes must be an array of tables")
    schemes = tuple(SchemeSpec.from_dict(s) for s in schemes_raw)

    mc = None
    if "mc" in data:
        m = data["mc"]
        try:
            mc = McSettings(int(m["n"]), int(m["seed"]), int(m.get("workers", 1)))
        except (KeyError, TypeError, ValueError):
            raise ConfigError("mc: needs integer 'n' and 'seed' (optional 'workers')") from None

    output = data.get("output", {})
    return ExperimentConfig(
        base=base,
        sweep_var=var,
        sweep_values=values,
        schemes=schemes,
        csv_path=output.get("csv"),
        plot_path=output.get("plot"),
        mc=mc,
        pin_t1=bool(sweep.get("pin_t1", False)),
        name=str(data.get("name", "experiment")),
        schema_version=version,
    )


def _read_toml(path) -> dict:
    path = Path(path)
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_config(path) -> ExperimentConfig:
    return parse_config(_read_toml(path))


def load_network(path) -> NetworkConfig:
    """Scenario from the ``[network]`` table of any config file."""
    return parse_network(_read_toml(path).get("network", {}))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    data: dict = {
        "schema_version": cfg.schema_version,
        "name": cfg.name,
        "network": {f.name: getattr(cfg.base, f.name) for f in fields(NetworkConfig)},
        "sweep": {"variable": cfg.sweep_var, "values": list(cfg.sweep_values), "pin_t1": cfg.pin_t1},
        "schemes": [s.to_dict() for s in cfg.schemes],
    }
    if cfg.mc is not None:
        data["mc"] = {"n": cfg.mc.n, "seed": cfg.mc.seed, "workers": cfg.mc.workers}
    output = {k: v for k, v in (("csv", cfg.csv_path), ("plot", cfg.plot_path)) if v is not None}
    if output:
        data["output"] = output
    return data


def dump_config(cfg: ExperimentConfig) -> str:
    """Normalized (SI) TOML echo of a config."""
    return tomli_w.dumps(config_to_dict(cfg))


def load_preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESETS}")
    text = resources.files("nomamec").joinpath("presets", f"{name}.toml").read_text()
    return parse_config(tomllib.loads(text))


@dataclass(frozen=True)
class Row:
    sweep_var: str
    sweep_value: float
    scheme: str
    ps_analytic: float
    ps_mc: float = math.nan
    stderr: float = math.nan
    t1: float = math.nan
    t2: float = math.nan
    beta_a: float = math.nan
    beta_b: float = math.nan
    lam: float = math.nan
    latency: float = math.nan

    def values(self) -> tuple:
        return (
            self.sweep_var, self.sweep_value, self.scheme, self.ps_analytic, self.ps_mc, self.stderr,
            self.t1, self.t2, self.beta_a, self.beta_b, self.lam, self.latency,
        )


def run_sweep(cfg: ExperimentConfig) -> list[Row]:
    """One row per (sweep value, scheme), ordered by sweep value then scheme order.

    A scheme whose allocation cannot meet the deadline at some point gets
    ``ps_analytic = 0`` (and ``ps_mc = 0``) with empty plan fields.
    """
    pinned = theorem1_allocation(cfg.base)[0] if cfg.pin_t1 else None
    rows = []
    for i, value in enumerate(cfg.sweep_values):
        net = apply_sweep(cfg.base, cfg.sweep_var, value)
        for j, spec in enumerate(cfg.schemes):
            try:
                plan = scheme_plan(net, spec, pin_t1=pinned if spec.kind is SchemeKind.PROPOSED else None)
            except InfeasibleDeadline:
                zero = 0.0 if cfg.mc is not None else math.nan
                rows.append(Row(cfg.sweep_var, value, spec.label, 0.0, zero, zero))
                continue
            ps = plan_ps(net, spec, plan)
            ps_mc = stderr = math.nan
            if cfg.mc is not None:
                est: PsEstimate = plan_ps(net, spec, plan, MonteCarlo(cfg.mc.n, [cfg.mc.seed, i, j], cfg.mc.workers))
                ps_mc, stderr = est.p_hat, est.stderr
            rows.append(Row(
                cfg.sweep_var, value, spec.label, ps, ps_mc, stderr,
                plan.t1, plan.t2, plan.beta_a, plan.beta_b, plan.lam, plan.latency,
            ))
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def rows_to_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([_fmt(v) for v in row.values()])
    return buf.getvalue()


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return [lo + (hi - lo) * k / (count - 1) for k in range(count)]


def render_svg(rows: list[Row], title: str = "", latency: bool = False) -> str:
    """Standalone SVG line plot of ``ps_analytic`` against the sweep value, one series per scheme.

    With ``latency=True`` the plan latency is drawn dashed on a right-hand axis.
    """
    width, height = 720, 440
    left, right, top, bottom = 70, 200 if latency else 170, 40, 55
    pw, ph = width - left - right, height - top - bottom
    schemes = list(dict.fromkeys(r.scheme for r in rows))
    xs = sorted({r.sweep_value for r in rows})
    x_lo, x_hi = xs[0], xs[-1]
    ys = [r.ps_analytic for r in rows]
    y_lo, y_hi = min(0.0, min(ys)), max(1.0, max(ys))
    lat = [r.latency for r in rows if not math.isnan(r.latency)]
    l_lo, l_hi = (min(lat), max(lat)) if lat else (0.0, 1.0)
    if l_hi == l_lo:
        l_hi = l_lo + 1.0

    def px(x):
        return left + (0.5 if x_hi == x_lo else (x - x_lo) / (x_hi - x_lo)) * pw

    def py(y, lo=y_lo, hi=y_hi):
        return top + (1 - (y - lo) / (hi - lo)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + pw / 2:.1f}" y="22" text-anchor="middle" font-size="15">{title}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in _ticks(x_lo, x_hi):
        out.append(f'<text x="{px(t):.1f}" y="{top + ph + 18}" text-anchor="middle">{t:.4g}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<text x="{left - 8}" y="{py(t) + 4:.1f}" text-anchor="end">{t:.3g}</text>')
    var = rows[0].sweep_var if rows else ""
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{var}</text>')
    out.append(
        f'<text x="18" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {top + ph / 2:.1f})">success probability</text>'
    )
    if latency:
        for t in _ticks(l_lo, l_hi):
            out.append(
                f'<text x="{left + pw + 8}" y="{py(t, l_lo, l_hi) + 4:.1f}">{t * 1e3:.3g}</text>'
            )
        out.append(f'<text x="{left + pw + 8}" y="{top - 8}">latency (ms)</text>')

    for k, name in enumerate(schemes):
        color = _PALETTE[k % len(_PALETTE)]
        pts = [(r.sweep_value, r.ps_analytic) for r in rows if r.scheme == name]
        path = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(
            f'<polyline class="series" data-scheme="{name}" fill="none" stroke="{color}" '
            f'stroke-width="2" points="{path}"/>'
        )
        if latency:
            lpts = [(r.sweep_value, r.latency) for r in rows if r.scheme == name and not math.isnan(r.latency)]
            lpath = " ".join(f"{px(x):.2f},{py(y, l_lo, l_hi):.2f}" for x, y in lpts)
            out.append(
                f'<polyline class="latency" data-scheme="{name}" fill="none" stroke="{color}" '
                f'stroke-width="2" stroke-dasharray="6 4" points="{lpath}"/>'
            )
        ly = top + 14 + 18 * k
        lx = width - right + (50 if latency else 15)
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_outputs(
    rows: list[Row], csv_path, plot_path=None, title: str = "", latency: bool = False
) -> list[Path]:
    """Write the CSV (and optionally the SVG plot); returns the written paths."""
    if not rows:
        raise ValueError("nothing to write: empty result table")
    written = []
    for path, text in ((csv_path, rows_to_csv(rows)), (plot_path, None)):
        if path is None:
            continue
        path = Path(path)
        if text is None:
            text = render_svg(rows, title, latency)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror}") from exc
        written.append(path)
    return written


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> tuple[list[Row], list[Path]]:
    """Sweep and write outputs; relative output paths are resolved against ``out_dir``."""
    rows = run_sweep(cfg)
    base = Path(out_dir) if out_dir is not None else Path.cwd()
    csv_path = base / (cfg.csv_path or f"{cfg.name}.csv")
    plot_path = base / cfg.plot_path if cfg.plot_path else None
    return rows, emit_outputs(rows, csv_path, plot_path, title=cfg.name, latency=cfg.pin_t1)


def reproduce(name: str, out_dir=None, mc: Optional[McSettings] = None):
    """Run a shipped figure preset; ``mc`` overrides its Monte Carlo settings."""
    cfg = load_preset(name)
    if mc is not None:
        cfg = replace(cfg, mc=mc)
    return run_experiment(cfg, out_dir)
