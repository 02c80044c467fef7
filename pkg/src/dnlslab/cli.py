"""Command-line orchestration: configs, single runs, verdicts, sweeps, plot tables.

Config files are JSON with explicit fields (no positional physics), see
``build_run`` for the schema.  Exit codes: 0 success, 2 configuration,
3 numerical failure, 4 I/O.  The default output root comes from the
DNLSLAB_OUT environment variable when --out is not given.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .asymptotics import (
    ExtractionError,
    correction_algebraic,
    crossover_time,
    error_metric,
    finalize_profile,
    load_profile,
    modulus_envelope,
    save_profile,
)
from .conformal import norm_bridge, to_u_frame
from .diagnostics import (
    check_l2_envelope,
    check_sup_limit,
    emit_report,
    fit_power_law,
    l2_envelope_exponent,
    mass_dissipation_ok,
    monitor_phi,
)
from .field import Field, Grid, build_initial_data, l2_norm, load_field, save_field, sup_norm
from .params import ExponentSet, PhysParams, synthesize_exponents
from .solver import NumericalError, SolverConfig, run

ENV_OUT = "DNLSLAB_OUT"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
VERDICT_SCHEMA = 1
DEFAULT_SNAPSHOTS = 49


class ConfigError(Exception):
    """Configuration problem, anchored to a line of the config file."""

    def __init__(self, path, line: int, msg: str):
        self.path, self.line, self.msg = str(path), int(line), msg
        super().__init__(f"{self.path}:{self.line}: {msg}")


def _find_line(text: str, key: str) -> int:
    """Best-effort line anchor: first line mentioning the quoted key."""
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return 1


@dataclass
class RunConfig:
    params: PhysParams
    exps: ExponentSet | None
    grid: Grid | None
    data: dict
    solver: SolverConfig
    out: Path
    seed: int
    data_n: int | None


def load_config(path) -> tuple[dict, str]:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise ConfigError(path, 1, f"cannot read config: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(path, e.lineno, e.msg) from e
    if not isinstance(doc, dict):
        raise ConfigError(path, 1, "config must be a JSON object")
    return doc, text


def _bump_builder(spec_list, seed: int):
    rng = np.random.default_rng(seed)
    bumps = []
    for spec in spec_list:
        width = float(spec.get("width", 1.0))
        center = [float(c) for c in spec.get("center", [0.0])]
        amp = spec.get("amp", [0.1, 0.0])
        if amp == "random":
            scale = float(spec.get("scale", 0.1))
            draw = rng.standard_normal(2) * scale
            amp_c = complex(draw[0], draw[1])
        else:
            amp_c = complex(float(amp[0]), float(amp[1]))
        bumps.append((amp_c, center, width))

    def bump(*meshes):
        total = np.zeros(meshes[0].shape, dtype=complex)
        for amp_c, center, width in bumps:
            r2 = np.zeros_like(meshes[0])
            for ax, mesh in enumerate(meshes):
                c = center[ax] if ax < len(center) else 0.0
                r2 = r2 + (mesh - c) ** 2
            total = total + amp_c * np.exp(-r2 / width**2)
        return total

    return bump


def build_run(doc: dict, path, text: str, out_override=None) -> RunConfig:
    """Validate a parsed config document and assemble the run objects.

    Schema (JSON object):
      phys:      {N, alpha, lam: [re, im], b}
      grid:      {L, M, boundary_tol?}            (optional with snapshot data)
      solver:    {frame, dt0?, c_adapt?, horizon_floor?, t_end?, snapshot_count?}
      data:      {c?, n?, bump?: [{amp|"random", center, width, scale?}, ...],
                  snapshot?: path}
      exponents: {strict?, n?, fallback_sigma?}   (optional; defaults to the
                  relaxed set at the data weight with the strict-window rate)
      out:       directory (optional; --out flag and DNLSLAB_OUT override)
      seed:      integer for randomized bumps (default 0)
    """

    def err(key, msg):
        raise ConfigError(path, _find_line(text, key), msg)

    for section in ("phys", "solver", "data"):
        if section not in doc:
            raise ConfigError(path, 1, f'missing section "{section}"')

    ph = doc["phys"]
    for key in ("N", "alpha", "lam", "b"):
        if key not in ph:
            err("phys", f'phys section needs "{key}"')
    try:
        lam = complex(float(ph["lam"][0]), float(ph["lam"][1]))
    except (TypeError, ValueError, IndexError):
        err("lam", "lam must be a [re, im] pair")
    if lam.imag > 0:
        err("lam", "Im(lam) > 0 amplifies mass; only dissipative or zero allowed")
    N = int(ph["N"])
    alpha = float(ph["alpha"])
    b = float(ph["b"])
    if N < 1:
        err("N", "dimension must be a positive integer")
    if alpha <= 0:
        err("alpha", "alpha must be positive")
    params = PhysParams(N, alpha, lam, b)

    sv = doc["solver"]
    frame = sv.get("frame", "v")
    if frame not in ("u", "v"):
        err("frame", "frame must be 'u' or 'v'")
    if frame == "v" and b <= 0:
        err("b", "rescaled-frame runs need b > 0")
    t_end = sv.get("t_end")
    if frame == "v" and t_end is not None and t_end * b >= 1.0:
        err("t_end", f"t_end = {t_end} reaches the horizon 1/b = {1.0 / b:.6g}")
    if frame == "u" and t_end is None:
        err("solver", "physical-frame runs need an explicit t_end")
    solver = SolverConfig(
        frame=frame,
        dt0=float(sv.get("dt0", 5e-4)),
        c_adapt=float(sv.get("c_adapt", 0.05)),
        horizon_floor=float(sv.get("horizon_floor", 1e-4)),
        t_end=None if t_end is None else float(t_end),
        snapshot_count=int(sv.get("snapshot_count", DEFAULT_SNAPSHOTS)),
    )

    da = doc["data"]
    data_n = int(da["n"]) if "n" in da else None
    if "snapshot" not in da:
        if "grid" not in doc:
            err("data", "grid section required unless data comes from a snapshot")
        if data_n is None:
            err("data", 'constructed data needs a weight order "n"')
        if "c" not in da:
            err("data", 'constructed data needs a leading coefficient "c"')

    grid = None
    if "grid" in doc:
        gr = doc["grid"]
        for key in ("L", "M"):
            if key not in gr:
                err("grid", f'grid section needs "{key}"')
        dim = int(gr.get("dim", N))
        if dim != N:
            err("grid", f"grid dimension {dim} does not match N = {N}")
        try:
            grid = Grid.box(gr["L"], gr["M"], dim,
                            boundary_tol=float(gr.get("boundary_tol", 1e-8)))
        except ValueError as e:
            err("grid", str(e))

    exps = None
    ex = doc.get("exponents")
    if ex is None and data_n is not None and lam.imag < 0:
        ex = {"strict": False, "n": data_n, "fallback_sigma": True}
    if ex is not None and lam.imag < 0:
        try:
            exps = synthesize_exponents(
                params,
                strict=bool(ex.get("strict", True)),
                n=ex.get("n"),
                fallback_sigma=bool(ex.get("fallback_sigma", False)),
            )
        except ValueError as e:
            err("exponents", str(e))
        if data_n is not None and exps.n != data_n:
            err("exponents", f"exponent weight n = {exps.n} does not match data n = {data_n}")

    out = out_override or doc.get("out") or os.environ.get(ENV_OUT) or "runs"
    return RunConfig(
        params=params,
        exps=exps,
        grid=grid,
        data=da,
        solver=solver,
        out=Path(out),
        seed=int(doc.get("seed", 0)),
        data_n=data_n,
    )


def _initial_field(rc: RunConfig) -> Field:
    if "snapshot" in rc.data:
        f = load_field(rc.data["snapshot"])
        if rc.grid is not None and (
            tuple(f.grid.points) != tuple(rc.grid.points)
            or not np.allclose(f.grid.extents, rc.grid.extents)
        ):
            raise ConfigError("<config>", 1, "snapshot grid does not match the grid section")
        if f.frame != rc.solver.frame:
            f = Field(f.grid, f.values, rc.solver.frame, f.t)
        return f
    bump = None
    if rc.data.get("bump"):
        bump = _bump_builder(rc.data["bump"], rc.seed)
    v0, _ = build_initial_data(rc.grid, complex(rc.data["c"]), rc.data_n, bump)
    if rc.solver.frame == "u":
        v0 = Field(v0.grid, v0.values, "u", 0.0)
    return v0


def _write_norms(out: Path, traj) -> Path:
    path = out / "norms.csv"
    have_weighted = traj.wsup is not None
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        header = ["t", "dt", "l2", "linf"] + (["wsup", "winf"] if have_weighted else [])
        w.writerow(header)
        for i in range(len(traj.times)):
            row = [float(traj.times[i]), float(traj.dts[i]),
                   float(traj.l2[i]), float(traj.linf[i])]
            if have_weighted:
                row += [float(traj.wsup[i]), float(traj.winf[i])]
            w.writerow(row)
    return path


def _write_snapshots(out: Path, traj) -> None:
    for i, snap in enumerate(traj.snapshots):
        save_field(snap, out / "snapshots" / f"snap_{i:04d}")


def _echo_config(out: Path, doc: dict) -> None:
    echo = {k: v for k, v in doc.items() if k != "out"}
    (out / "run_config.json").write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n")


def cmd_simulate(cfg_path, out_override=None, max_order: int = 4) -> int:
    doc, text = load_config(cfg_path)
    rc = build_run(doc, cfg_path, text, out_override)
    v0 = _initial_field(rc)
    traj = run(v0, rc.solver, rc.params, exps=rc.exps)
    rc.out.mkdir(parents=True, exist_ok=True)
    _echo_config(rc.out, doc)
    _write_norms(rc.out, traj)
    _write_snapshots(rc.out, traj)
    monitor = None
    if rc.solver.frame == "v" and rc.params.lam.imag < 0 and rc.exps is not None:
        monitor = monitor_phi(traj, v0, rc.exps, max_order)
    emit_report(rc.out, traj, monitor=monitor)
    print(f"simulate: {len(traj.times) - 1} steps, artifacts in {rc.out}")
    return EXIT_OK


def _profile_error_series(traj, profile):
    ts, e2s, einfs = [], [], []
    b = traj.params.b
    for snap in traj.snapshots:
        t = snap.t / (1.0 - b * snap.t)
        if t < 1.0:
            continue
        u = to_u_frame(snap, b)
        e2, einf = error_metric(u, profile)
        ts.append(t)
        e2s.append(e2)
        einfs.append(einf)
    return np.array(ts), np.array(e2s), np.array(einfs)


def run_pipeline(doc: dict, text: str, cfg_path, out_override=None, max_order: int = 4) -> dict:
    """simulate -> profile -> bridge -> checks -> verdict; writes all artifacts."""
    rc = build_run(doc, cfg_path, text, out_override)
    if rc.solver.frame != "v" or rc.params.lam.imag >= 0:
        raise ConfigError(cfg_path, _find_line(text, "frame"),
                          "theorem verification needs a rescaled-frame dissipative run")
    v0 = _initial_field(rc)
    traj = run(v0, rc.solver, rc.params, exps=rc.exps)
    out = rc.out
    out.mkdir(parents=True, exist_ok=True)
    _echo_config(out, doc)
    _write_norms(out, traj)
    _write_snapshots(out, traj)

    profile = None
    extraction_error = None
    try:
        profile = finalize_profile(traj, correction_algebraic(traj))
        save_profile(profile, out / "profile")
    except ExtractionError as e:
        # far below the regime the horizon limit does not exist; classify,
        # do not crash
        extraction_error = str(e)

    series = norm_bridge(traj)
    with open(out / "bridge.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "t", "l2", "linf"])
        for i in range(len(series.t)):
            w.writerow([float(series.s[i]), float(series.t[i]),
                        float(series.l2[i]), float(series.linf[i])])

    sup_check = check_sup_limit(series, rc.params)
    n_weight = rc.data_n if rc.data_n is not None else rc.exps.n
    l2_check = check_l2_envelope(series, rc.params, n_weight)

    slope_l2 = slope_sup = None
    if profile is not None:
        ts, e2s, einfs = _profile_error_series(traj, profile)
        with open(out / "error_metric.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "err_l2_compensated", "err_sup_compensated"])
            for i in range(ts.size):
                w.writerow([float(ts[i]), float(e2s[i]), float(einfs[i])])
        if ts.size >= 8:
            window = (float(ts.max() / 10.0), float(ts.max()))
            try:
                slope_l2 = fit_power_law(ts, e2s, window).exponent
                slope_sup = fit_power_law(ts, einfs, window).exponent
            except ValueError:
                pass  # degenerate errors (exact profile); leave unset

    monitor = monitor_phi(traj, v0, rc.exps, max_order)
    mass_ok, mass_worst = mass_dissipation_ok(traj)

    ok_sup = sup_check["deviation_u"] <= 0.05
    ok_l2 = l2_check["exponent_deviation"] <= 0.10 and l2_check["band_ratio"] <= 2.0
    ok_profile = (
        slope_l2 is not None and slope_sup is not None
        and slope_l2 <= -0.05 and slope_sup <= -0.05
    )
    compliant = bool(
        mass_ok and monitor.f_within_quarter and monitor.decay_pointwise and monitor.psi_bounded
    )
    if ok_sup and ok_l2 and ok_profile:
        verdict = "pass"
    elif not compliant:
        verdict = "not in theorem regime"
    else:
        verdict = "fail"

    profile_check = {"slope_l2": slope_l2, "slope_sup": slope_sup, "ok": ok_profile}
    if extraction_error is not None:
        profile_check["error"] = extraction_error
    checks = {
        "sup_limit": {**sup_check, "ok": ok_sup},
        "l2_envelope": {**l2_check, "ok": ok_l2},
        "profile_error": profile_check,
        "mass_dissipation": {"ok": mass_ok, "worst_growth": mass_worst},
    }
    strict_ref = synthesize_exponents(rc.params) if rc.params.lam.imag < 0 else None
    doc_out = {
        "schema_version": VERDICT_SCHEMA,
        "verdict": verdict,
        "compliant_regime": compliant,
        "crossover_time": crossover_time(rc.params.b, rc.params.alpha, rc.params.N),
        "checks": checks,
        "monitors": {
            "f_max": float(np.max(monitor.f_sup)),
            "f_within_quarter": monitor.f_within_quarter,
            "decay_pointwise": monitor.decay_pointwise,
            "psi_bounded": monitor.psi_bounded,
            "psi_ratio": monitor.psi_ratio,
        },
        "exponents": {
            "k": rc.exps.k, "n": rc.exps.n, "m": rc.exps.m, "J": rc.exps.J,
            "sigma": rc.exps.sigma, "strict": rc.exps.strict,
            "violations": list(rc.exps.violations),
            "strict_reference": None if strict_ref is None else {
                "k": strict_ref.k, "n": strict_ref.n,
                "m": strict_ref.m, "J": strict_ref.J,
            },
        },
        "profile_meta": profile.meta if profile is not None
        else {"extraction_error": extraction_error},
    }
    (out / "verdict.json").write_text(json.dumps(doc_out, indent=2, sort_keys=True) + "\n")
    emit_report(out, traj, monitor=monitor, checks=checks,
                profile_meta=doc_out["profile_meta"])
    return doc_out


def cmd_verify_theorem(cfg_path, out_override=None, max_order: int = 4) -> int:
    doc, text = load_config(cfg_path)
    result = run_pipeline(doc, text, cfg_path, out_override, max_order)
    print(f"verdict: {result['verdict']}")
    return EXIT_OK


SWEEP_AXES = ("alpha", "lam", "b", "n")


def _render_sweep(base: dict, combo: dict) -> dict:
    doc = json.loads(json.dumps(base))  # deep copy
    if "alpha" in combo:
        doc["phys"]["alpha"] = combo["alpha"]
    if "lam" in combo:
        doc["phys"]["lam"] = combo["lam"]
    if "b" in combo:
        doc["phys"]["b"] = combo["b"]
    if "n" in combo:
        doc.setdefault("data", {})["n"] = combo["n"]
        if "exponents" in doc and doc["exponents"].get("n") is not None:
            doc["exponents"]["n"] = combo["n"]
    return doc


def _sweep_worker(task):
    index, doc, out_dir, max_order = task
    row = {
        "run": f"run_{index:03d}",
        "alpha": doc["phys"]["alpha"],
        "lam_re": doc["phys"]["lam"][0],
        "lam_im": doc["phys"]["lam"][1],
        "b": doc["phys"]["b"],
        "n": doc.get("data", {}).get("n"),
    }
    try:
        text = json.dumps(doc, indent=2)
        result = run_pipeline(doc, text, f"<sweep:{index}>",
                              Path(out_dir) / row["run"], max_order)
        row.update(
            verdict=result["verdict"],
            sup_target=result["checks"]["sup_limit"]["target_u"],
            sup_deviation=result["checks"]["sup_limit"]["deviation_u"],
            l2_target=result["checks"]["l2_envelope"]["target_exponent"],
            l2_fitted=result["checks"]["l2_envelope"]["fitted"]["exponent"],
            band_ratio=result["checks"]["l2_envelope"]["band_ratio"],
            slope_l2=result["checks"]["profile_error"]["slope_l2"],
            slope_sup=result["checks"]["profile_error"]["slope_sup"],
            f_max=result["monitors"]["f_max"],
            f_within_quarter=result["monitors"]["f_within_quarter"],
            decay_pointwise=result["monitors"]["decay_pointwise"],
            status="ok",
        )
    except Exception as e:  # per-run failures must not kill the sweep
        row.update(
            verdict="", sup_target="", sup_deviation="", l2_target="",
            l2_fitted="", band_ratio="", slope_l2="", slope_sup="",
            f_max="", f_within_quarter="", decay_pointwise="",
            status=f"error: {e}",
        )
    return index, row


def cmd_sweep(cfg_path, out_override=None, jobs: int = 1, max_order: int = 4) -> int:
    doc, text = load_config(cfg_path)
    if "base" not in doc or "grid" not in doc:
        raise ConfigError(cfg_path, 1, 'sweep config needs "base" and "grid" sections')
    base, grid = doc["base"], doc["grid"]
    axes = [(k, grid[k]) for k in SWEEP_AXES if k in grid]
    if not axes or any(len(vals) == 0 for _, vals in axes):
        raise ConfigError(cfg_path, _find_line(text, "grid"), "sweep grid is empty")
    combos = [dict(zip([k for k, _ in axes], values))
              for values in itertools.product(*[vals for _, vals in axes])]

    out = Path(out_override or doc.get("out") or os.environ.get(ENV_OUT) or "runs") / "sweep"
    out.mkdir(parents=True, exist_ok=True)
    tasks = [(i, _render_sweep(base, combo), str(out), max_order)
             for i, combo in enumerate(combos)]
    if jobs <= 1:
        results = [_sweep_worker(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sweep_worker, tasks))
    results.sort(key=lambda pair: pair[0])

    rows = [row for _, row in results]
    agg = out / "sweep.csv"
    with open(agg, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        w.writeheader()
        w.writerows(rows)
    failures = sum(1 for r in rows if r["status"] != "ok")
    print(f"sweep: {len(rows)} runs, {failures} failed, table in {agg}")
    return EXIT_OK


PSI_SLICE_GAUGES = (1e-1, 1e-2, 1e-3, 1e-4)


def cmd_plot_data(run_dir, out_override=None) -> int:
    """Emit long-format CSV tables from a verify run's artifacts.

    plots/compensated.csv: t, series in {sup_compensated, l2_compensated}, value
    plots/errors.csv:      t, series in {err_l2_compensated, err_sup_compensated}, value
    plots/psi_slices.csv:  gauge, x, psi  (slices of the modulus envelope)
    """
    root = Path(run_dir)
    cfg_path = root / "run_config.json"
    bridge_path = root / "bridge.csv"
    err_path = root / "error_metric.csv"
    prof_dir = root / "profile"
    for needed in (cfg_path, bridge_path, err_path, prof_dir):
        if not needed.exists():
            raise FileNotFoundError(f"missing run artifact: {needed}")
    doc = json.loads(cfg_path.read_text())
    ph = doc["phys"]
    params = PhysParams(int(ph["N"]), float(ph["alpha"]),
                        complex(ph["lam"][0], ph["lam"][1]), float(ph["b"]))
    n_weight = int(doc["data"]["n"])
    e = l2_envelope_exponent(params, n_weight)

    out = Path(out_override) if out_override else root / "plots"
    out.mkdir(parents=True, exist_ok=True)

    with open(bridge_path) as fh:
        rows = list(csv.DictReader(fh))
    with open(out / "compensated.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "series", "value"])
        for r in rows:
            t, l2v, linfv = float(r["t"]), float(r["l2"]), float(r["linf"])
            if t <= 0:
                continue
            w.writerow([t, "sup_compensated", t * linfv**params.alpha])
            w.writerow([t, "l2_compensated", (1.0 + params.b * t) ** e * l2v])

    with open(err_path) as fh:
        err_rows = list(csv.DictReader(fh))
    with open(out / "errors.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "series", "value"])
        for r in err_rows:
            w.writerow([float(r["t"]), "err_l2_compensated", float(r["err_l2_compensated"])])
            w.writerow([float(r["t"]), "err_sup_compensated", float(r["err_sup_compensated"])])

    profile = load_profile(prof_dir)
    grid = profile.reference.grid
    axis = grid.axes()[0]
    with open(out / "psi_slices.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["gauge", "x", "psi"])
        for gauge in PSI_SLICE_GAUGES:
            t = (1.0 - gauge) / params.b
            psi = modulus_envelope(t, profile)
            if grid.dim > 1:
                centre = tuple(m // 2 for m in grid.points[1:])
                psi = psi[(slice(None),) + centre]
            for x, val in zip(axis, psi):
                w.writerow([float(gauge), float(x), float(val)])
    print(f"plot-data: tables in {out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dnlslab",
        description="Dissipative NLS laboratory: simulate, verify, sweep, plot.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one simulation and dump artifacts")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=None)
    p_sim.add_argument("--max-order", type=int, default=4)

    p_ver = sub.add_parser("verify-theorem", help="full pipeline with a verdict")
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--out", default=None)
    p_ver.add_argument("--max-order", type=int, default=4)

    p_swp = sub.add_parser("sweep", help="grid of runs, aggregated CSV")
    p_swp.add_argument("--config", required=True)
    p_swp.add_argument("--out", default=None)
    p_swp.add_argument("--jobs", type=int, default=1)
    p_swp.add_argument("--max-order", type=int, default=4)

    p_plt = sub.add_parser("plot-data", help="plot-ready tables from run artifacts")
    p_plt.add_argument("run_dir")
    p_plt.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out, args.max_order)
        if args.command == "verify-theorem":
            return cmd_verify_theorem(args.config, args.out, args.max_order)
        if args.command == "sweep":
            return cmd_sweep(args.config, args.out, args.jobs, args.max_order)
        if args.command == "plot-data":
            return cmd_plot_data(args.run_dir, args.out)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, ExtractionError) as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as e:
        print(f"i/o failure: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
