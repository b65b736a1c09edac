"""Scenario configuration: schema, strict validation, TOML loading.

The schema (not the notation) is normative: a scenario is a nested
mapping with the sections below, every key is checked, and unknown keys
anywhere are errors so typos never pass silently.

    name            optional run name
    output_dir      optional default output directory
    [model]         d
    [grid]          half_width, n_points
    [time]          t_end, cfl, dt_max, dt_min*, breaking_slope_threshold*
    [initial_data]  profile, amplitude, center, width, sign, samples
    [numerics]      dealias, sign_tol
    [observers]     every_steps, every_time
    [diagnostics]   energy, momentum_residual, margins, riccati, frontier,
                    snapshots
    [particles]     count
    [ep_verify]     enabled, extent*, points, snapshot_window
    [sweep]         d, amplitude, n_points   (lists; empty = no sweep)

Entries marked * default to values derived from the initial data.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

__all__ = ["ConfigError", "ScenarioConfig", "validate_config", "load_config"]


class ConfigError(ValueError):
    """Configuration rejected before any computation."""


class _Section:
    def __init__(self, raw: dict, path: str):
        if not isinstance(raw, dict):
            raise ConfigError(f"section {path!r} must be a table/mapping")
        self.raw = dict(raw)
        self.path = path

    def take(self, key, kind, default=None, required=False):
        if key not in self.raw:
            if required:
                raise ConfigError(f"missing required key {self.path}{key}")
            return default
        val = self.raw.pop(key)
        if kind is float:
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ConfigError(f"{self.path}{key} must be a number, got {val!r}")
            return float(val)
        if kind is int:
            if isinstance(val, bool) or not isinstance(val, int):
                raise ConfigError(f"{self.path}{key} must be an integer, got {val!r}")
            return int(val)
        if kind is bool:
            if not isinstance(val, bool):
                raise ConfigError(f"{self.path}{key} must be a boolean, got {val!r}")
            return val
        if kind is str:
            if not isinstance(val, str):
                raise ConfigError(f"{self.path}{key} must be a string, got {val!r}")
            return val
        if kind is list:
            if not isinstance(val, list):
                raise ConfigError(f"{self.path}{key} must be a list, got {val!r}")
            return val
        raise AssertionError(kind)

    def take_number_list(self, key) -> tuple:
        vals = self.take(key, list, default=[])
        out = []
        for v in vals:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{self.path}{key} must hold numbers, got {v!r}")
            out.append(float(v))
        return tuple(out)

    def subsection(self, key) -> "_Section":
        raw = self.raw.pop(key, {})
        return _Section(raw, f"{self.path}{key}.")

    def finish(self):
        if self.raw:
            keys = ", ".join(sorted(f"{self.path}{k}" for k in self.raw))
            raise ConfigError(f"unknown key(s): {keys}")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    output_dir: str | None
    d: float
    half_width: float
    n_points: int
    t_end: float
    cfl: float
    dt_max: float
    dt_min: float | None
    breaking_slope_threshold: float | None
    profile: str
    amplitude: float
    center: float
    width: float
    sign: int
    samples: tuple | None
    dealias: bool
    sign_tol: float
    every_steps: int | None
    every_time: float | None
    diag_energy: bool
    diag_momentum: bool
    diag_margins: bool
    diag_riccati: bool
    diag_frontier: bool
    diag_snapshots: bool
    particle_count: int
    ep_enabled: bool
    ep_extent: float | None
    ep_points: tuple
    sweep_d: tuple
    sweep_amplitude: tuple
    sweep_n_points: tuple

    @property
    def has_sweep(self) -> bool:
        return bool(self.sweep_d or self.sweep_amplitude or self.sweep_n_points)

    def sweep_cells(self) -> list["ScenarioConfig"]:
        """Cartesian product of the sweep lists, as standalone configs."""
        ds = self.sweep_d or (self.d,)
        amps = self.sweep_amplitude or (self.amplitude,)
        ns = self.sweep_n_points or (self.n_points,)
        if len(ds) * len(amps) * len(ns) > 10_000:
            raise ConfigError("sweep grid exceeds 10^4 cells")
        cells = []
        for dv in ds:
            for av in amps:
                for nv in ns:
                    cells.append(
                        replace(
                            self,
                            d=dv,
                            amplitude=av,
                            n_points=int(nv),
                            sweep_d=(),
                            sweep_amplitude=(),
                            sweep_n_points=(),
                            name=f"{self.name}_d{dv:g}_a{av:g}_n{int(nv)}",
                        )
                    )
        return cells


def validate_config(raw: dict) -> ScenarioConfig:
    """Schema-validate a raw mapping; unknown keys are errors."""
    top = _Section(raw, "")
    name = top.take("name", str, default="scenario")
    output_dir = top.take("output_dir", str)

    model = top.subsection("model")
    d = model.take("d", float, required=True)
    model.finish()
    if not d >= 1.0:
        raise ConfigError(f"model.d must be >= 1, got {d}")

    grid = top.subsection("grid")
    half_width = grid.take("half_width", float, required=True)
    n_points = grid.take("n_points", int, required=True)
    grid.finish()

    time = top.subsection("time")
    t_end = time.take("t_end", float, required=True)
    cfl = time.take("cfl", float, default=0.3)
    dt_max = time.take("dt_max", float, default=0.1)
    dt_min = time.take("dt_min", float)
    m_break = time.take("breaking_slope_threshold", float)
    time.finish()
    if m_break is not None and not m_break < 0.0:
        raise ConfigError("time.breaking_slope_threshold must be negative")

    init = top.subsection("initial_data")
    profile = init.take("profile", str, required=True)
    amplitude = init.take("amplitude", float, default=1.0)
    center = init.take("center", float, default=0.0)
    width = init.take("width", float, default=1.0)
    sign = init.take("sign", int, default=1)
    samples = init.take("samples", list)
    init.finish()

    numerics = top.subsection("numerics")
    dealias = numerics.take("dealias", bool, default=True)
    sign_tol = numerics.take("sign_tol", float, default=1e-9)
    numerics.finish()

    observers = top.subsection("observers")
    every_steps = observers.take("every_steps", int)
    every_time = observers.take("every_time", float)
    observers.finish()
    if every_steps is not None and every_steps <= 0:
        raise ConfigError("observers.every_steps must be positive")
    if every_time is not None and every_time <= 0:
        raise ConfigError("observers.every_time must be positive")
    if every_steps is None and every_time is None:
        every_steps = 10

    diags = top.subsection("diagnostics")
    diag_energy = diags.take("energy", bool, default=True)
    diag_momentum = diags.take("momentum_residual", bool, default=True)
    diag_margins = diags.take("margins", bool, default=True)
    diag_riccati = diags.take("riccati", bool, default=True)
    diag_frontier = diags.take("frontier", bool, default=True)
    diag_snapshots = diags.take("snapshots", bool, default=False)
    diags.finish()

    particles = top.subsection("particles")
    particle_count = particles.take("count", int, default=64)
    particles.finish()
    if particle_count < 0:
        raise ConfigError("particles.count must be >= 0")

    ep = top.subsection("ep_verify")
    ep_enabled = ep.take("enabled", bool, default=False)
    ep_extent = ep.take("extent", float)
    ep_points_raw = ep.take("points", list, default=[32, 64])
    ep.finish()
    ep_points = []
    for p in ep_points_raw:
        if isinstance(p, bool) or not isinstance(p, int):
            raise ConfigError("ep_verify.points must hold integers")
        ep_points.append(p)
    if ep_enabled and d != int(d):
        raise ConfigError("ep_verify needs an integer dimension d")
    if ep_enabled and int(d) > 3:
        raise ConfigError("ep_verify runs at d <= 3 only")
    if ep_enabled and every_time is None:
        raise ConfigError(
            "ep_verify needs observers.every_time (uniform snapshot spacing)"
        )

    sweep = top.subsection("sweep")
    sweep_d = sweep.take_number_list("d")
    sweep_amplitude = sweep.take_number_list("amplitude")
    sweep_n = sweep.take_number_list("n_points")
    sweep.finish()
    for nv in sweep_n:
        if nv != int(nv):
            raise ConfigError("sweep.n_points must hold integers")

    top.finish()

    cfg = ScenarioConfig(
        name=name,
        output_dir=output_dir,
        d=d,
        half_width=half_width,
        n_points=n_points,
        t_end=t_end,
        cfl=cfl,
        dt_max=dt_max,
        dt_min=dt_min,
        breaking_slope_threshold=m_break,
        profile=profile,
        amplitude=amplitude,
        center=center,
        width=width,
        sign=sign,
        samples=tuple(samples) if samples is not None else None,
        dealias=dealias,
        sign_tol=sign_tol,
        every_steps=every_steps,
        every_time=every_time,
        diag_energy=diag_energy,
        diag_momentum=diag_momentum,
        diag_margins=diag_margins,
        diag_riccati=diag_riccati,
        diag_frontier=diag_frontier,
        diag_snapshots=diag_snapshots,
        particle_count=particle_count,
        ep_enabled=ep_enabled,
        ep_extent=ep_extent,
        ep_points=tuple(ep_points),
        sweep_d=sweep_d,
        sweep_amplitude=sweep_amplitude,
        sweep_n_points=tuple(int(n) for n in sweep_n),
    )
    # Grid and parameter sanity beyond types; reuse the core validators.
    from .core import build_grid

    try:
        build_grid(cfg.half_width, cfg.n_points)
    except ValueError as err:
        raise ConfigError(f"grid: {err}")
    if not 0.0 < cfl <= 1.0:
        raise ConfigError(f"time.cfl must lie in (0, 1], got {cfl}")
    if t_end < 0.0:
        raise ConfigError(f"time.t_end must be >= 0, got {t_end}")
    if not 0.0 < sign_tol < 1.0:
        raise ConfigError(f"numerics.sign_tol must lie in (0, 1), got {sign_tol}")
    return cfg


def load_config(path) -> ScenarioConfig:
    """Load and validate a TOML scenario file."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"no such config file: {path}")
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"malformed TOML in {path}: {err}")
    return validate_config(raw)
