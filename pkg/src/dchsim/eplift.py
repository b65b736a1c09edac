"""Verification of the dimensional reduction by lifting 1D solutions.

A 1D solution v(t, x) lifts to d-dimensional fields along the diagonal:
every velocity component equals v(x_1 + ... + x_d) and every momentum
component equals n(x_1 + ... + x_d).  If the reduction is correct these
lifted fields solve the d-dimensional momentum system

    dm_i/dt + sum_j u_j d_j m_i + sum_j (d_i u_j) m_j + m_i sum_j d_j u_j = 0

identically, so the residual of that system, evaluated with 2nd-order
centered differences in space and time on a small tensor grid, must
vanish at 2nd order under refinement.  The time derivative comes from
differencing stored snapshots, not from the 1D right-hand side, so the
check is independent of the solver's own algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Field, spectral_derivative
from .lagrangian import interp

__all__ = ["EPGridSpec", "LiftedFields", "lift_field", "ep_residual", "EPResidualReport"]

MAX_TENSOR_POINTS = 2**24


@dataclass(frozen=True)
class EPGridSpec:
    """Per-axis extent and point count of the tensor verification grid."""

    extent: float
    points: int

    def __post_init__(self):
        if not (self.extent > 0.0 and self.points >= 8):
            raise ValueError("need extent > 0 and at least 8 points per axis")

    def axis(self) -> np.ndarray:
        # Half-open box per axis, matching the 1D grid convention.
        h = 2.0 * self.extent / self.points
        return -self.extent + h * np.arange(self.points)

    @property
    def h(self) -> float:
        return 2.0 * self.extent / self.points


@dataclass(frozen=True)
class LiftedFields:
    """Diagonal lift of one snapshot: all d components share these arrays."""

    d: int
    t: float
    spec: EPGridSpec
    u: np.ndarray  # velocity ridge v(x_1 + ... + x_d), shape (points,)*d
    m: np.ndarray  # momentum ridge n(x_1 + ... + x_d)


def _diag_sum(spec: EPGridSpec, d: int) -> np.ndarray:
    ax = spec.axis()
    s = ax
    for _ in range(d - 1):
        s = s[..., None] + ax
    return s


def lift_field(v: Field, d: int, spec: EPGridSpec, t: float = 0.0) -> LiftedFields:
    """Sample the diagonal lift of (v, n) on the tensor grid."""
    if d < 1 or d != int(d):
        raise ValueError(f"lift dimension must be a positive integer, got {d}")
    d = int(d)
    if spec.points**d > MAX_TENSOR_POINTS:
        raise ValueError(
            f"tensor grid {spec.points}^{d} exceeds the {MAX_TENSOR_POINTS} point guard"
        )
    reach = d * spec.extent
    if reach > v.grid.half_width - 2 * v.grid.h:
        raise ValueError(
            f"diagonal argument reaches {reach:.3g}, beyond the interpolable "
            f"1D box of half-width {v.grid.half_width:.3g}"
        )
    s = _diag_sum(spec, d)
    n = v - d * spectral_derivative(v, 2)
    u = np.asarray(interp(v, s.ravel())).reshape(s.shape)
    m = np.asarray(interp(n, s.ravel())).reshape(s.shape)
    return LiftedFields(d=d, t=t, spec=spec, u=u, m=m)


def _centered_diff(arr: np.ndarray, axis: int, h: float) -> np.ndarray:
    out = np.empty_like(arr)
    lead = np.roll(arr, -1, axis=axis)
    lag = np.roll(arr, 1, axis=axis)
    out[...] = (lead - lag) / (2.0 * h)
    return out


def _interior(arr: np.ndarray) -> np.ndarray:
    sl = tuple(slice(1, -1) for _ in range(arr.ndim))
    return arr[sl]


@dataclass(frozen=True)
class EPResidualReport:
    """Residual norms of the lifted momentum system, per component."""

    d: int
    points: int
    dt_snap: float
    max_per_component: tuple
    l2_per_component: tuple
    times: tuple

    @property
    def max_residual(self) -> float:
        return max(self.max_per_component)

    @property
    def l2_residual(self) -> float:
        return max(self.l2_per_component)


def ep_residual(
    snapshots: list[tuple[float, Field]],
    d: int,
    spec: EPGridSpec,
    corrupt_component: int | None = None,
    corrupt_factor: float = 1.01,
) -> EPResidualReport:
    """Evaluate the full momentum-system residual on lifted snapshots.

    Needs at least 3 snapshots at uniform spacing (centered time
    differences).  ``corrupt_component`` deliberately scales one velocity
    component to break the ansatz, as a negative control.
    """
    if len(snapshots) < 3:
        raise ValueError("need at least 3 uniformly spaced snapshots")
    times = np.asarray([t for t, _ in snapshots])
    spacings = np.diff(times)
    dt = float(spacings[0])
    if dt <= 0.0 or np.max(np.abs(spacings - dt)) > 1e-9 * max(dt, 1.0):
        raise ValueError(f"snapshot spacing is not uniform: {spacings}")

    lifts = [lift_field(v, d, spec, t=t) for t, v in snapshots]
    he = spec.h

    factors = np.ones(d)
    if corrupt_component is not None:
        factors[corrupt_component] = corrupt_factor

    worst = np.zeros(d)
    l2 = np.zeros(d)
    used_times = []
    for j in range(1, len(lifts) - 1):
        U, M = lifts[j].u, lifts[j].m
        dm_dt = (lifts[j + 1].m - lifts[j - 1].m) / (2.0 * dt)
        dU = [_centered_diff(U, a, he) for a in range(d)]
        dM = [_centered_diff(M, a, he) for a in range(d)]
        # u . grad m_i and div u, with u_j = factors[j] * U
        advect = sum(factors[a] * U * dM[a] for a in range(d))
        div_u = sum(factors[a] * dU[a] for a in range(d))
        sum_factors = float(factors.sum())
        for i in range(d):
            # (grad u)^T m: sum_j (d_i u_j) m_j = (sum_j factors_j) d_i U * M
            stretch = sum_factors * dU[i] * M
            res = _interior(dm_dt + advect + stretch + M * div_u)
            worst[i] = max(worst[i], float(np.max(np.abs(res))))
            l2[i] = max(l2[i], float(np.sqrt(np.sum(res**2) * he**d)))
        used_times.append(float(lifts[j].t))

    return EPResidualReport(
        d=d,
        points=spec.points,
        dt_snap=dt,
        max_per_component=tuple(worst),
        l2_per_component=tuple(l2),
        times=tuple(used_times),
    )
