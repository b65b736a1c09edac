"""Scenario orchestration: build, classify, integrate, record, persist.

``execute`` runs a scenario entirely in memory and returns a RunResult
carrying every recorded diagnostic; ``run_scenario`` wraps it with the
on-disk artifact layout the CLI exposes.  Tests drive ``execute`` so the
verified code path and the CLI code path are the same.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import analysis, io, lagrangian
from .config import ScenarioConfig
from .core import (
    Field,
    InitialDataSpec,
    SimParams,
    SimState,
    build_grid,
    sample_initial_data,
)
from .eplift import EPGridSpec, EPResidualReport, ep_residual
from .timestepper import (
    Completed,
    NumericalFailure,
    RunOutcome,
    StepControl,
    WaveBreaking,
    integrate,
)

__all__ = ["RunResult", "execute", "run_scenario", "exit_code_for"]


@dataclass
class RunResult:
    config: ScenarioConfig
    params: SimParams
    ctrl: StepControl
    classification: analysis.Classification
    sup_bound: analysis.SupNormBound
    t_bound: float | None
    outcome: RunOutcome
    rows: list = field(default_factory=list)  # TIMESERIES_COLUMNS tuples
    margin_scales: list = field(default_factory=list)
    case_bounds: list = field(default_factory=list)  # (t, bound) for global runs
    frontier: list = field(default_factory=list)  # (t, left, right, q, min_vx)
    log_jacobians: list = field(default_factory=list)  # (t, array) per record
    riccati: analysis.RiccatiTrace | None = None
    snapshots: list = field(default_factory=list)  # (t, values array)
    initial_state: SimState | None = None
    final_state: SimState | None = None
    initial_particles: lagrangian.ParticleSet | None = None
    final_particles: lagrangian.ParticleSet | None = None
    ep_reports: list = field(default_factory=list)

    @property
    def energy_drift(self) -> float:
        e = np.array([r[2] for r in self.rows])
        if e.size == 0 or e[0] == 0.0:
            return 0.0
        return float(np.max(np.abs(e - e[0])) / abs(e[0]))

    def worst_margins(self) -> tuple[float, float, float]:
        cols = np.array([[r[7], r[8], r[9]] for r in self.rows], dtype=float)
        if cols.size == 0 or np.isnan(cols).all():
            return (math.nan, math.nan, math.nan)
        return tuple(float(np.nanmin(cols[:, j])) for j in range(3))


def _initial_data_spec(cfg: ScenarioConfig) -> InitialDataSpec:
    return InitialDataSpec(
        profile=cfg.profile,
        amplitude=cfg.amplitude,
        center=cfg.center,
        width=cfg.width,
        sign=cfg.sign,
        samples=np.asarray(cfg.samples) if cfg.samples is not None else None,
    )


def execute(cfg: ScenarioConfig) -> RunResult:
    """Run one scenario in memory, recording diagnostics at the cadence."""
    grid = build_grid(cfg.half_width, cfg.n_points)
    v0 = sample_initial_data(_initial_data_spec(cfg), grid, cfg.d)
    state0 = SimState(0.0, v0, cfg.d)

    params = SimParams(
        d=cfg.d,
        grid=grid,
        t_end=cfg.t_end,
        cfl=cfg.cfl,
        dt_min=cfg.dt_min if cfg.dt_min is not None else 1e-8,
        dt_max=cfg.dt_max,
        breaking_slope_threshold=(
            cfg.breaking_slope_threshold
            if cfg.breaking_slope_threshold is not None
            else -1e3
        ),
        sign_tol=cfg.sign_tol,
        dealias=cfg.dealias,
    )
    ctrl = StepControl.for_initial_data(
        params,
        state0.min_vx,
        breaking_slope_threshold=cfg.breaking_slope_threshold,
        dt_min=cfg.dt_min,
    )

    classification = analysis.classify_initial_data(v0, params)
    sup_bound = analysis.sup_norm_bound(v0, cfg.d)
    t_bound = None
    if classification.verdict is analysis.Verdict.BLOWUP_SLOPE:
        t_bound = analysis.blowup_time_upper_bound(v0, cfg.d, classification.x0)

    particles = None
    if cfg.particle_count > 0:
        particles = lagrangian.seed_particles(
            state0.n, count=cfg.particle_count, force_x0=classification.x0
        )

    trace = None
    if (
        cfg.diag_riccati
        and particles is not None
        and classification.verdict is analysis.Verdict.BLOWUP_SLOPE
    ):
        trace = analysis.RiccatiTrace(classification.x0)

    pattern = classification.sign_pattern
    track_frontier = (
        cfg.diag_frontier
        and particles is not None
        and classification.x0 is not None
        and pattern in ("neg_then_pos", "pos_then_neg")
    )

    result = RunResult(
        config=cfg,
        params=params,
        ctrl=ctrl,
        classification=classification,
        sup_bound=sup_bound,
        t_bound=t_bound,
        outcome=Completed(t_end=0.0),  # replaced below
        riccati=trace,
        initial_state=state0,
        initial_particles=particles,
    )

    is_global = classification.verdict in (
        analysis.Verdict.GLOBAL_CASE1,
        analysis.Verdict.GLOBAL_CASE2,
    )
    keep_snapshots = cfg.diag_snapshots or cfg.ep_enabled

    def observer(state: SimState, parts) -> None:
        energy = analysis.energy(state.v, cfg.d) if cfg.diag_energy else math.nan
        momentum = (
            lagrangian.momentum_invariant_residual(state, parts)
            if (cfg.diag_momentum and parts is not None)
            else math.nan
        )
        if cfg.diag_margins:
            rep = analysis.convolution_inequality_margin(state, cfg.d)
            mf, mg, mp = rep.margin_f, rep.margin_g, rep.margin_p
            result.margin_scales.append(rep.scale)
        else:
            mf = mg = mp = math.nan
            result.margin_scales.append(math.nan)
        result.rows.append(
            (
                state.t,
                state.last_dt,
                energy,
                state.min_vx,
                state.argmin_vx_x,
                state.max_abs_v,
                momentum,
                mf,
                mg,
                mp,
                analysis.boundary_contamination(state),
            )
        )
        if is_global:
            bound = (
                analysis.case1_pointwise_bound(state, cfg.d)
                if classification.verdict is analysis.Verdict.GLOBAL_CASE1
                else analysis.case2_onesided_bound(state, cfg.d)
            )
            result.case_bounds.append((state.t, bound))
        if track_frontier:
            rep = lagrangian.sign_frontier(state, parts, classification.x0, pattern)
            spec = np.abs(np.fft.rfft(state.n.values)) ** 2
            tail = float(spec[state.grid.n_points // 3 + 1 :].sum() / max(spec.sum(), 1e-300))
            result.frontier.append(
                (state.t, rep.left, rep.right, rep.frontier, state.min_vx, tail)
            )
        if parts is not None:
            result.log_jacobians.append((state.t, parts.log_jac.copy()))
        if trace is not None:
            trace.record(state, parts)
        if keep_snapshots:
            result.snapshots.append((state.t, state.v.values.copy()))
        result.final_state = state
        result.final_particles = parts

    outcome = integrate(
        state0,
        params,
        ctrl,
        observers=[observer],
        particles=particles,
        every_steps=cfg.every_steps,
        every_time=cfg.every_time,
    )
    result.outcome = outcome

    if cfg.ep_enabled and len(result.snapshots) >= 3 and cfg.every_time is not None:
        extent = cfg.ep_extent
        if extent is None:
            extent = 0.45 * grid.half_width / cfg.d
        snaps = [
            (t, Field(vals, grid)) for t, vals in result.snapshots[-3:]
        ]
        for pts in cfg.ep_points:
            result.ep_reports.append(
                ep_residual(snaps, int(cfg.d), EPGridSpec(extent=extent, points=pts))
            )
    return result


def exit_code_for(outcome: RunOutcome) -> int:
    if isinstance(outcome, Completed):
        return 0
    if isinstance(outcome, WaveBreaking):
        return 2
    if isinstance(outcome, NumericalFailure):
        return 3
    return 1


def _outcome_payload(res: RunResult) -> dict:
    out = res.outcome
    payload = {"kind": out.kind}
    if isinstance(out, Completed):
        payload["t_end"] = out.t_end
    elif isinstance(out, WaveBreaking):
        payload.update(
            {
                "t_detect": out.t_detect,
                "x_detect": out.x_detect,
                "min_vx": out.min_vx,
                "breaking_slope_threshold": res.ctrl.breaking_slope_threshold,
                "dt_min": res.ctrl.dt_min,
                "t_bound": res.t_bound,
                "certificate": [[t, m] for t, m in out.certificate],
            }
        )
    elif isinstance(out, NumericalFailure):
        payload.update({"t": out.t, "reason": out.reason})
    return payload


def _classification_payload(res: RunResult) -> dict:
    c = res.classification
    return {
        "verdict": c.verdict.value,
        "x0": c.x0,
        "margins": c.margins,
        "sign_pattern": c.sign_pattern,
        "regularity_ok": c.regularity_ok,
        "sup_norm_bound": res.sup_bound.m_inf,
        "h1_norm": res.sup_bound.h1_norm,
        "t_bound": res.t_bound,
    }


def _ep_payload(rep: EPResidualReport) -> dict:
    return {
        "d": rep.d,
        "points": rep.points,
        "dt_snap": rep.dt_snap,
        "max_per_component": list(rep.max_per_component),
        "l2_per_component": list(rep.l2_per_component),
        "times": list(rep.times),
    }


def persist(res: RunResult, out_dir) -> None:
    """Write the artifact set for one finished run."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    io.write_csv(out / "timeseries.csv", io.TIMESERIES_COLUMNS, res.rows)
    io.write_json(out / "classification.json", _classification_payload(res))
    io.write_json(out / "outcome.json", _outcome_payload(res))
    if res.riccati is not None and len(res.riccati) > 0:
        tr = res.riccati
        bound = tr.linear_bound(res.params.d)
        rows = [
            (tr.t[i], tr.q[i], tr.g[i], tr.a[i], tr.b[i], float(bound[i]))
            for i in range(len(tr))
        ]
        io.write_csv(out / "riccati.csv", io.RICCATI_COLUMNS, rows)
    if res.config.diag_snapshots:
        for idx, (t, vals) in enumerate(res.snapshots):
            io.write_snapshot(
                out / f"snap_{idx}.bin",
                res.params.grid.half_width,
                res.params.d,
                t,
                vals,
            )
    if res.ep_reports:
        io.write_json(
            out / "ep_residual.json",
            {"reports": [_ep_payload(r) for r in res.ep_reports]},
        )


def run_scenario(cfg: ScenarioConfig, out_dir) -> tuple[int, RunResult]:
    """Execute and persist; returns (exit_code, result)."""
    res = execute(cfg)
    persist(res, out_dir)
    return exit_code_for(res.outcome), res
