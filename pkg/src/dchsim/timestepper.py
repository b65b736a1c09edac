"""Method-of-lines integration with CFL step control and breaking detection.

Wave breaking (the slope running away to -infinity along a bounded
solution, the only blow-up mechanism of this equation family) cannot be
observed literally at finite resolution.  The detector therefore demands
two independent symptoms of the same runaway before declaring it: the
recorded slope minimum must cross a large negative threshold AND the
CFL-chosen step must have collapsed onto its floor.  Anything non-finite
is a numerical failure, kept distinct from detection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import Field, SimParams, SimState
from .rhs import RhsWorkspace, rhs_v

__all__ = [
    "StepControl",
    "RunOutcome",
    "Completed",
    "WaveBreaking",
    "NumericalFailure",
    "NonFiniteStateError",
    "choose_dt",
    "step_rk4",
    "integrate",
]

RhsFn = Callable[[Field, RhsWorkspace], Field]


class NonFiniteStateError(ArithmeticError):
    """A Runge-Kutta stage produced NaN or Inf."""

    def __init__(self, t: float, reason: str):
        super().__init__(reason)
        self.t = t
        self.reason = reason


@dataclass(frozen=True)
class StepControl:
    """Step-size policy and the breaking threshold."""

    cfl: float = 0.3
    dt_min: float = 1e-8
    dt_max: float = 0.1
    breaking_slope_threshold: float = -1e3

    def __post_init__(self):
        if not 0.0 < self.dt_min < self.dt_max:
            raise ValueError("need 0 < dt_min < dt_max")
        if not self.breaking_slope_threshold < 0.0:
            raise ValueError("breaking_slope_threshold must be negative")

    @classmethod
    def from_params(cls, params: SimParams) -> "StepControl":
        return cls(
            cfl=params.cfl,
            dt_min=params.dt_min,
            dt_max=params.dt_max,
            breaking_slope_threshold=params.breaking_slope_threshold,
        )

    @classmethod
    def for_initial_data(
        cls,
        params: SimParams,
        v0_slope_min: float,
        breaking_slope_threshold: float | None = None,
        dt_min: float | None = None,
    ) -> "StepControl":
        """Derive detector defaults from the initial slope.

        The threshold defaults to -1e3*(1 + |min v0_x|), three orders past
        the initial slope scale; the step floor defaults to cfl/|threshold|
        so the CFL rule lands on the floor exactly when the slope crosses
        the threshold.
        """
        m_break = breaking_slope_threshold
        if m_break is None:
            m_break = -1e3 * (1.0 + abs(min(v0_slope_min, 0.0)))
        if dt_min is None:
            dt_min = min(params.cfl / abs(m_break), 0.99 * params.dt_max)
        return cls(
            cfl=params.cfl,
            dt_min=dt_min,
            dt_max=params.dt_max,
            breaking_slope_threshold=m_break,
        )


class RunOutcome:
    """Base of the tagged union returned by :func:`integrate`."""

    kind = "outcome"


@dataclass(frozen=True)
class Completed(RunOutcome):
    kind = "completed"
    t_end: float


@dataclass(frozen=True)
class WaveBreaking(RunOutcome):
    kind = "wave_breaking"
    t_detect: float
    x_detect: float
    min_vx: float
    certificate: tuple  # full (t, min_x v_x) history of the run


@dataclass(frozen=True)
class NumericalFailure(RunOutcome):
    kind = "numerical_failure"
    t: float
    reason: str


def choose_dt(state: SimState, ctrl: StepControl, t_end: float | None = None) -> float:
    """CFL step: cfl * min(h/(d max|v|), 1/|min(v_x,0)|), clamped.

    The first cap follows the transport speed d*v, the second keeps the
    slope runaway resolved in time.  The slope-driven shrink is floored at
    dt_min (the collapse the breaking detector reads) and everything is
    capped at dt_max and, when given, the remaining time to t_end.  The
    transport cap is never overridden by the floor: stability wins over
    the floor whenever the two disagree.
    """
    eps = 1e-300
    transport = ctrl.cfl * state.grid.h / (state.d * state.max_abs_v + eps)
    slope = ctrl.cfl / max(-min(state.min_vx, 0.0), eps)
    dt = min(transport, max(slope, ctrl.dt_min), ctrl.dt_max)
    if t_end is not None:
        dt = min(dt, t_end - state.t)
    return dt


def _check_finite(arr: np.ndarray, t: float, label: str) -> None:
    if not np.isfinite(arr).all():
        raise NonFiniteStateError(t, f"non-finite values in {label}")


def _rk4_stages(
    v: Field, t: float, dt: float, ws: RhsWorkspace, rhs_fn: RhsFn
) -> tuple[Field, list[Field]]:
    """Classical RK4 update of v; returns the new field and stage fields."""
    y1 = v
    k1 = rhs_fn(y1, ws)
    _check_finite(k1.values, t, "RK stage 1")
    y2 = v + (0.5 * dt) * k1
    k2 = rhs_fn(y2, ws)
    _check_finite(k2.values, t, "RK stage 2")
    y3 = v + (0.5 * dt) * k2
    k3 = rhs_fn(y3, ws)
    _check_finite(k3.values, t, "RK stage 3")
    y4 = v + dt * k3
    k4 = rhs_fn(y4, ws)
    _check_finite(k4.values, t, "RK stage 4")
    v_new = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_finite(v_new.values, t, "RK update")
    return v_new, [y1, y2, y3, y4]


def step_rk4(
    state: SimState, dt: float, ws: RhsWorkspace, rhs_fn: RhsFn = rhs_v
) -> SimState:
    """One classical RK4 step of size dt.

    Raises :class:`NonFiniteStateError` if any stage leaves IEEE range.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    v_new, _ = _rk4_stages(state.v, state.t, dt, ws, rhs_fn)
    return state.advanced(v_new, dt)


def integrate(
    state: SimState,
    params: SimParams,
    ctrl: StepControl,
    observers: Sequence[Callable[[SimState, object], None]] = (),
    *,
    particles=None,
    every_steps: int | None = None,
    every_time: float | None = None,
    ws: RhsWorkspace | None = None,
    rhs_fn: RhsFn = rhs_v,
) -> RunOutcome:
    """Advance until t_end, wave breaking, or numerical failure.

    Observers are called synchronously with read-only access to the
    current state (and particle set, if one rides along), at t0, at the
    configured cadence, and always on the final state.  When a time
    cadence is set the step is capped so recorded states land on the exact
    cadence times.  Particles advance inside the same RK4 stages as the
    field.
    """
    if ws is None:
        ws = RhsWorkspace(params.grid, params.d, dealias=params.dealias)
    t_end = params.t_end
    eps_end = 1e-12 * max(1.0, abs(t_end))

    last_emit_step = -1

    def emit():
        nonlocal last_emit_step
        if state.step_count != last_emit_step:
            for obs in observers:
                obs(state, particles)
            last_emit_step = state.step_count

    emit()
    t0 = state.t
    n_obs = 1  # cadence index for exact-time records

    while t_end - state.t > eps_end:
        dt_cfl = choose_dt(state, ctrl)
        dt = min(dt_cfl, t_end - state.t)
        if every_time is not None:
            target = t0 + n_obs * every_time
            if target - state.t > eps_end:
                dt = min(dt, target - state.t)
        try:
            if particles is not None:
                from .lagrangian import advance_particles

                v_new, stages = _rk4_stages(state.v, state.t, dt, ws, rhs_fn)
                particles = advance_particles(particles, stages, dt, params.d)
                state = state.advanced(v_new, dt)
            else:
                state = step_rk4(state, dt, ws, rhs_fn)
        except NonFiniteStateError as err:
            return NumericalFailure(t=err.t, reason=err.reason)

        if every_time is not None and state.t >= t0 + n_obs * every_time - eps_end:
            emit()
            while state.t >= t0 + n_obs * every_time - eps_end:
                n_obs += 1
        if every_steps and state.step_count % every_steps == 0:
            emit()

        # Breaking verdict: slope past threshold AND the CFL choice for
        # the step just taken already sat on the floor.
        if (
            state.min_vx <= ctrl.breaking_slope_threshold
            and dt_cfl <= ctrl.dt_min * (1.0 + 1e-9)
        ):
            emit()
            return WaveBreaking(
                t_detect=state.t,
                x_detect=state.argmin_vx_x,
                min_vx=state.min_vx,
                certificate=tuple(state.min_vx_history),
            )

    emit()
    return Completed(t_end=state.t)
