"""Shared domain types and grid numerics.

Everything in this package works on real-valued grid functions sampled on
a uniform periodic grid standing in for the real line.  This module owns
the grid, the field container, the simulation state with its derived
caches, the initial-data profile library, and Fourier collocation
derivatives.  Operator inversion, right-hand sides, time stepping and
diagnostics all build on top of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "BOUNDARY_DECAY_TOL",
    "PROFILES",
    "BoundaryDecayError",
    "Grid",
    "Field",
    "SimParams",
    "SimState",
    "InitialDataSpec",
    "build_grid",
    "profile_values",
    "sample_initial_data",
    "spectral_derivative",
]

# Relative amplitude a profile may carry at the box edge before the
# periodic truncation of the line is considered unfaithful.
BOUNDARY_DECAY_TOL = 1e-12


class BoundaryDecayError(ValueError):
    """Raised when data does not decay enough for the periodic box."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with nodes x_j = -L + j*h on [-L, L).

    ``n_points`` must be a power of two (>= 16) so the fast transforms
    stay radix-2; build instances through :func:`build_grid`.
    """

    half_width: float
    n_points: int

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_width + self.h * np.arange(self.n_points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """rfft-layout wavenumbers pi*m/L for m = 0 .. N/2."""
        return (math.pi / self.half_width) * np.arange(self.n_points // 2 + 1)

    def same_as(self, other: "Grid") -> bool:
        return (
            self.n_points == other.n_points
            and self.half_width == other.half_width
        )


def build_grid(half_width: float, n_points: int) -> Grid:
    """Construct a grid, validating the power-of-two resolution contract."""
    if not (half_width > 0.0 and math.isfinite(half_width)):
        raise ValueError(f"half_width must be positive and finite, got {half_width}")
    n = int(n_points)
    if n != n_points:
        raise ValueError(f"n_points must be integral, got {n_points}")
    if n < 16 or (n & (n - 1)) != 0:
        raise ValueError(f"n_points must be a power of two >= 16, got {n}")
    return Grid(float(half_width), n)


class Field:
    """A real grid function: N float64 samples bound to a grid.

    Non-finite entries are a detectable error state, not a construction
    error; integrators and diagnostics check :attr:`is_finite` where the
    contract requires it.
    """

    __slots__ = ("values", "grid")

    def __init__(self, values, grid: Grid):
        vals = np.asarray(values, dtype=np.float64)
        if vals.shape != (grid.n_points,):
            raise ValueError(
                f"field has {vals.shape} values for a grid of {grid.n_points} points"
            )
        self.values = vals
        self.grid = grid

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    def copy(self) -> "Field":
        return Field(self.values.copy(), self.grid)

    def _binary(self, other, op):
        if isinstance(other, Field):
            if not self.grid.same_as(other.grid):
                raise ValueError("fields live on different grids")
            return Field(op(self.values, other.values), self.grid)
        return Field(op(self.values, other), self.grid)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return Field(other - self.values, self.grid)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self._binary(other, np.multiply)

    def __truediv__(self, other):
        if isinstance(other, Field):
            raise TypeError("field/field division is not part of the algebra")
        return Field(self.values / other, self.grid)

    def __neg__(self):
        return Field(-self.values, self.grid)

    def __repr__(self):
        return (
            f"Field(N={self.grid.n_points}, L={self.grid.half_width}, "
            f"min={self.values.min():.3g}, max={self.values.max():.3g})"
        )


def spectral_derivative(f: Field, order: int = 1) -> Field:
    """Fourier collocation derivative of the given order.

    Exact for resolved trigonometric polynomials.  The Nyquist mode is
    zeroed for odd orders, where it carries no sign information.
    Non-finite input propagates to non-finite output.
    """
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    g = f.grid
    fh = np.fft.rfft(f.values)
    mult = (1j * g.wavenumbers) ** order
    if order % 2 == 1:
        mult = mult.copy()
        mult[-1] = 0.0
    return Field(np.fft.irfft(fh * mult, n=g.n_points), g)


@dataclass(frozen=True)
class SimParams:
    """Run-level parameters: the dimension parameter d plus numerics."""

    d: float
    grid: Grid
    t_end: float
    cfl: float = 0.3
    dt_min: float = 1e-8
    dt_max: float = 0.1
    breaking_slope_threshold: float = -1e3
    sign_tol: float = 1e-9
    dealias: bool = True

    def __post_init__(self):
        if not self.d >= 1.0:
            raise ValueError(f"dimension parameter d must be >= 1, got {self.d}")
        if not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"cfl must lie in (0, 1], got {self.cfl}")
        if not self.t_end >= 0.0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if not 0.0 < self.dt_min < self.dt_max:
            raise ValueError(
                f"need 0 < dt_min < dt_max, got {self.dt_min}, {self.dt_max}"
            )
        if not self.breaking_slope_threshold < 0.0:
            raise ValueError("breaking_slope_threshold must be negative")
        if not 0.0 < self.sign_tol < 1.0:
            raise ValueError(f"sign_tol must lie in (0, 1), got {self.sign_tol}")


class SimState:
    """Velocity field at a fixed time plus derived caches.

    The caches (``v_x``, ``n``, extrema) are computed at construction from
    ``v`` so they can never go stale; ``n = v - d*v_xx`` holds to spectral
    accuracy whenever read.  Instances are single-writer values: the
    integration loop that owns one may replace it, nobody mutates it.
    ``min_vx_history`` is shared along an integration lineage and grows by
    one ``(t, min_x v_x)`` pair per accepted step.
    """

    __slots__ = (
        "t",
        "d",
        "v",
        "v_x",
        "n",
        "last_dt",
        "step_count",
        "min_vx_history",
        "min_vx",
        "argmin_vx_x",
        "max_abs_v",
    )

    def __init__(
        self,
        t: float,
        v: Field,
        d: float,
        last_dt: float = 0.0,
        step_count: int = 0,
        min_vx_history: list | None = None,
    ):
        self.t = float(t)
        self.d = float(d)
        self.v = v
        self.v_x = spectral_derivative(v, 1)
        self.n = v - d * spectral_derivative(v, 2)
        self.last_dt = float(last_dt)
        self.step_count = int(step_count)
        idx = int(np.argmin(self.v_x.values))
        self.min_vx = float(self.v_x.values[idx])
        self.argmin_vx_x = float(v.grid.x[idx])
        self.max_abs_v = float(np.max(np.abs(v.values)))
        if min_vx_history is None:
            min_vx_history = [(self.t, self.min_vx)]
        self.min_vx_history = min_vx_history

    @property
    def grid(self) -> Grid:
        return self.v.grid

    @property
    def is_finite(self) -> bool:
        return self.v.is_finite

    def advanced(self, v_new: Field, dt: float) -> "SimState":
        """Successor state after one accepted step of size dt."""
        nxt = SimState(
            self.t + dt,
            v_new,
            self.d,
            last_dt=dt,
            step_count=self.step_count + 1,
            min_vx_history=self.min_vx_history,
        )
        self.min_vx_history.append((nxt.t, nxt.min_vx))
        return nxt


PROFILES = (
    "gaussian",
    "peakon",
    "neg_x_gaussian",
    "momentum_gaussian",
    "momentum_odd",
    "custom_samples",
)


@dataclass(frozen=True)
class InitialDataSpec:
    """Named initial-data profile with its shape parameters.

    ``gaussian``, ``peakon`` and ``neg_x_gaussian`` define the velocity
    directly; the ``momentum_*`` profiles define the momentum density n0
    and the sampler returns the velocity obtained by inverting the
    nonlocal operator.  ``custom_samples`` takes the nodal values as-is.
    """

    profile: str
    amplitude: float = 1.0
    center: float = 0.0
    width: float = 1.0
    sign: int = 1
    samples: np.ndarray | None = None

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}; expected one of {PROFILES}")
        if not self.width > 0.0:
            raise ValueError(f"profile width must be positive, got {self.width}")
        if self.sign not in (1, -1):
            raise ValueError(f"profile sign must be +1 or -1, got {self.sign}")
        if self.profile == "custom_samples" and self.samples is None:
            raise ValueError("custom_samples profile needs a samples array")


def profile_values(spec: InitialDataSpec, x: np.ndarray, d: float) -> np.ndarray:
    """Evaluate the named analytic profile at the points x.

    For the ``momentum_*`` profiles this is the momentum density n0, not
    the velocity.  ``custom_samples`` has no analytic form and is rejected.
    """
    a = spec.sign * spec.amplitude
    s = np.asarray(x, dtype=np.float64) - spec.center
    w = spec.width
    if spec.profile == "gaussian":
        return a * np.exp(-((s / w) ** 2))
    if spec.profile == "peakon":
        # Decay rate 1/sqrt(d): the traveling-wave candidate profile.
        return a * np.exp(-np.abs(s) / math.sqrt(d))
    if spec.profile == "neg_x_gaussian":
        return -a * s * np.exp(-((s / w) ** 2))
    if spec.profile == "momentum_gaussian":
        return a * np.exp(-((s / w) ** 2))
    if spec.profile == "momentum_odd":
        return a * s * np.exp(-((s / w) ** 2))
    raise ValueError(f"profile {spec.profile!r} has no pointwise form")


def _check_boundary_decay(values: np.ndarray, grid: Grid, what: str) -> None:
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return
    edge = max(abs(float(values[0])), abs(float(values[-1])))
    if edge > BOUNDARY_DECAY_TOL * scale:
        raise BoundaryDecayError(
            f"{what} has relative boundary amplitude {edge / scale:.3e} "
            f"> {BOUNDARY_DECAY_TOL:.0e} on [-L, L) with L={grid.half_width}; "
            "widen the box or narrow the profile"
        )


def sample_initial_data(spec: InitialDataSpec, grid: Grid, d: float) -> Field:
    """Sample the named profile on the grid, returning the velocity field.

    Momentum profiles define n0 and return v0 from the kernel inversion.
    Refuses profiles that do not decay below ``BOUNDARY_DECAY_TOL``
    relative amplitude at the box edge (periodic truncation would not be
    faithful to the line).
    """
    if spec.profile == "custom_samples":
        v = Field(np.array(spec.samples, dtype=np.float64), grid)
        _check_boundary_decay(v.values, grid, "custom samples")
        return v

    vals = profile_values(spec, grid.x, d)
    if spec.profile in ("momentum_gaussian", "momentum_odd"):
        from .helmholtz import HelmholtzOperator, helmholtz_invert

        _check_boundary_decay(vals, grid, f"momentum profile {spec.profile!r}")
        v = helmholtz_invert(Field(vals, grid), HelmholtzOperator(grid, d))
        _check_boundary_decay(
            v.values, grid, f"velocity induced by {spec.profile!r} (kernel tails)"
        )
        return v

    _check_boundary_decay(vals, grid, f"profile {spec.profile!r}")
    return Field(vals, grid)
