"""Command-line front end.

Subcommands: run, sweep, classify, verify-ep, inspect.  Exit codes from
`run`: 0 completed, 2 wave breaking detected, 3 numerical failure,
1 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import io, runner
from .config import ConfigError, ScenarioConfig, load_config
from .eplift import EPGridSpec, ep_residual


def _default_out(cfg: ScenarioConfig, override: str | None) -> Path:
    if override:
        return Path(override)
    if cfg.output_dir:
        return Path(cfg.output_dir)
    return Path("runs") / cfg.name


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    code, res = runner.run_scenario(cfg, _default_out(cfg, args.output))
    out = res.outcome
    print(f"{cfg.name}: {out.kind} (exit {code})")
    if out.kind == "wave_breaking":
        print(
            f"  t_detect={out.t_detect:.6g} x_detect={out.x_detect:.6g} "
            f"min_vx={out.min_vx:.6g} t_bound={res.t_bound}"
        )
    return code


def _run_cell(payload) -> dict:
    cfg, out_dir = payload
    try:
        code, res = runner.run_scenario(cfg, out_dir)
        mf, mg, mp = res.worst_margins()
        t_final = (
            res.outcome.t_detect
            if res.outcome.kind == "wave_breaking"
            else (res.outcome.t_end if res.outcome.kind == "completed" else res.outcome.t)
        )
        return {
            "name": cfg.name,
            "d": cfg.d,
            "amplitude": cfg.amplitude,
            "n_points": cfg.n_points,
            "verdict": res.classification.verdict.value,
            "outcome": res.outcome.kind,
            "t_final": t_final,
            "energy_drift": res.energy_drift,
            "worst_margin_F": mf,
            "worst_margin_G": mg,
            "worst_margin_P": mp,
            "exit_code": code,
        }
    except Exception as err:  # partial failure tolerated, marked in summary
        return {
            "name": cfg.name,
            "d": cfg.d,
            "amplitude": cfg.amplitude,
            "n_points": cfg.n_points,
            "verdict": "",
            "outcome": f"error: {err}",
            "t_final": float("nan"),
            "energy_drift": float("nan"),
            "worst_margin_F": float("nan"),
            "worst_margin_G": float("nan"),
            "worst_margin_P": float("nan"),
            "exit_code": 1,
        }


SUMMARY_COLUMNS = (
    "cell",
    "name",
    "d",
    "amplitude",
    "n_points",
    "verdict",
    "outcome",
    "t_final",
    "energy_drift",
    "worst_margin_F",
    "worst_margin_G",
    "worst_margin_P",
    "exit_code",
)


def _cmd_sweep(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    base = _default_out(cfg, args.output)
    cells = cfg.sweep_cells()
    jobs = [(cell, base / f"cell_{i:03d}_{cell.name}") for i, cell in enumerate(cells)]
    workers = args.workers or min(4, len(jobs))
    if workers <= 1 or len(jobs) == 1:
        results = [_run_cell(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_cell, jobs))
    base.mkdir(parents=True, exist_ok=True)
    rows = []
    for i, rec in enumerate(results):
        rows.append(
            (
                i,
                rec["name"],
                rec["d"],
                rec["amplitude"],
                rec["n_points"],
                rec["verdict"],
                rec["outcome"],
                rec["t_final"],
                rec["energy_drift"],
                rec["worst_margin_F"],
                rec["worst_margin_G"],
                rec["worst_margin_P"],
                rec["exit_code"],
            )
        )
    _write_summary(base / "summary.csv", rows)
    bad = sum(1 for rec in results if rec["outcome"].startswith("error"))
    print(f"sweep: {len(results)} cells, {bad} failed; summary at {base/'summary.csv'}")
    return 0 if bad == 0 else 1


def _write_summary(path, rows) -> None:
    lines = [",".join(SUMMARY_COLUMNS)]
    for row in rows:
        parts = []
        for v in row:
            if isinstance(v, str):
                parts.append(v.replace(",", ";"))
            else:
                parts.append(io.fmt(v))
        lines.append(",".join(parts))
    Path(path).write_text("\n".join(lines) + "\n")


def _cmd_classify(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 1
    from . import analysis
    from .core import SimParams, build_grid, sample_initial_data
    from .runner import _classification_payload, _initial_data_spec

    grid = build_grid(cfg.half_width, cfg.n_points)
    v0 = sample_initial_data(_initial_data_spec(cfg), grid, cfg.d)
    params = SimParams(
        d=cfg.d, grid=grid, t_end=max(cfg.t_end, 0.0), sign_tol=cfg.sign_tol
    )
    classification = analysis.classify_initial_data(v0, params)
    sup = analysis.sup_norm_bound(v0, cfg.d)
    t_bound = None
    if classification.verdict is analysis.Verdict.BLOWUP_SLOPE:
        t_bound = analysis.blowup_time_upper_bound(v0, cfg.d, classification.x0)

    class _Shim:
        pass

    shim = _Shim()
    shim.classification = classification
    shim.sup_bound = sup
    shim.t_bound = t_bound
    print(json.dumps(_classification_payload(shim), indent=2, sort_keys=True))
    return 0


def _cmd_verify_ep(args) -> int:
    run_dir = Path(args.run_dir)
    snaps = sorted(
        run_dir.glob("snap_*.bin"), key=lambda p: int(p.stem.split("_")[1])
    )
    if len(snaps) < 3:
        print(f"need at least 3 snapshots in {run_dir}", file=sys.stderr)
        return 1
    from .core import Field, build_grid

    loaded = [io.read_snapshot(p) for p in snaps[-args.count :]]
    d = loaded[0]["d"]
    if d != int(d) or not 1 <= int(d) <= 3:
        print(f"snapshots carry d={d}; lift needs integer d in 1..3", file=sys.stderr)
        return 1
    grid = build_grid(loaded[0]["half_width"], loaded[0]["n_points"])
    series = [(s["t"], Field(s["values"], grid)) for s in loaded]
    extent = args.extent or 0.45 * grid.half_width / d
    reports = []
    for pts in args.points:
        rep = ep_residual(series, int(d), EPGridSpec(extent=extent, points=pts))
        reports.append(rep)
        print(
            f"points={pts}: max residual {rep.max_residual:.6g}, "
            f"l2 {rep.l2_residual:.6g}"
        )
    io.write_json(
        run_dir / "ep_residual.json",
        {"reports": [runner._ep_payload(r) for r in reports]},
    )
    return 0


def _cmd_inspect(args) -> int:
    path = Path(args.file)
    if not path.exists():
        print(f"no such file: {path}", file=sys.stderr)
        return 1
    try:
        if path.suffix == ".bin":
            snap = io.read_snapshot(path)
            vals = snap["values"]
            print(
                f"snapshot v{snap['version']}: N={snap['n_points']} "
                f"L={snap['half_width']:g} d={snap['d']:g} t={snap['t']:.9g}"
            )
            print(
                f"  min={vals.min():.6g} max={vals.max():.6g} "
                f"finite={bool(np.isfinite(vals).all())}"
            )
        elif path.suffix == ".csv":
            header, data = io.read_csv(path)
            print(f"csv: {len(header)} columns, {data.shape[0]} rows")
            print(f"  columns: {', '.join(header)}")
            if data.shape[0]:
                first = ", ".join(io.fmt(v) for v in data[0])
                last = ", ".join(io.fmt(v) for v in data[-1])
                print(f"  first: {first}")
                print(f"  last:  {last}")
        elif path.suffix == ".json":
            payload = json.loads(path.read_text())
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:
            print(f"unknown artifact type: {path.name}", file=sys.stderr)
            return 1
    except (ValueError, json.JSONDecodeError) as err:
        print(f"cannot parse {path}: {err}", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dchsim",
        description="Numerical laboratory for the reduced Camassa-Holm type equation",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one scenario and persist artifacts")
    run.add_argument("config")
    run.add_argument("--output", help="output directory (default from config)")
    run.set_defaults(fn=_cmd_run)

    sweep = sub.add_parser("sweep", help="run the Cartesian sweep of a scenario")
    sweep.add_argument("config")
    sweep.add_argument("--output")
    sweep.add_argument("--workers", type=int, default=0, help="0 = auto")
    sweep.set_defaults(fn=_cmd_sweep)

    cls = sub.add_parser("classify", help="classify initial data, no integration")
    cls.add_argument("config")
    cls.set_defaults(fn=_cmd_classify)

    ep = sub.add_parser("verify-ep", help="evaluate the lifted-system residual")
    ep.add_argument("run_dir")
    ep.add_argument("--points", type=int, nargs="+", default=[32, 64])
    ep.add_argument("--extent", type=float, default=None)
    ep.add_argument("--count", type=int, default=3, help="snapshots to use (from the end)")
    ep.set_defaults(fn=_cmd_verify_ep)

    ins = sub.add_parser("inspect", help="parse and summarize an artifact file")
    ins.add_argument("file")
    ins.set_defaults(fn=_cmd_inspect)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
