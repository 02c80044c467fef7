"""Rate fitting, decay-limit checks, and truncated weighted monitors.

Everything here is read-only over trajectories.  The monitors classify a
run (compliant / non-compliant with the large-coefficient regime); they
never raise on a broken bound.  Fits and limit checks return plain report
structures that ``emit_report`` serializes to JSON plus a per-snapshot CSV.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .asymptotics import correction_algebraic, horizon_gauge
from .conformal import NormSeries
from .field import (
    Field,
    data_bound,
    l2_norm,
    spectral_derivative,
    sup_norm,
    weighted_inf,
    weighted_sup_norm,
)
from .params import ExponentSet, PhysParams
from .solver import Trajectory

MIN_FIT_SAMPLES = 8
REPORT_SCHEMA = 1


@dataclass(frozen=True)
class RateFit:
    """Least-squares power-law fit of a positive series in log-log."""

    exponent: float
    prefactor: float
    window: tuple[float, float]
    residual: float
    samples: int

    def __post_init__(self):
        if not self.window[0] < self.window[1]:
            raise ValueError("fit window is empty")
        if self.samples < MIN_FIT_SAMPLES:
            raise ValueError(
                f"power-law fit needs at least {MIN_FIT_SAMPLES} samples, got {self.samples}"
            )

    def as_dict(self) -> dict:
        return {
            "exponent": self.exponent,
            "prefactor": self.prefactor,
            "window": list(self.window),
            "residual": self.residual,
            "samples": self.samples,
        }


def fit_power_law(times, values, window: tuple[float, float] | None = None) -> RateFit:
    """Fit value = prefactor * t^exponent over the window (default: all samples)."""
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t.shape != v.shape:
        raise ValueError("times and values must have matching shapes")
    if window is None:
        mask = np.ones_like(t, dtype=bool)
    else:
        mask = (t >= window[0]) & (t <= window[1])
    t, v = t[mask], v[mask]
    if t.size < MIN_FIT_SAMPLES:
        raise ValueError(
            f"power-law fit needs at least {MIN_FIT_SAMPLES} samples, got {t.size}"
        )
    if np.any(t <= 0) or np.any(v <= 0):
        raise ValueError("power-law fit requires positive times and values")
    lt, lv = np.log(t), np.log(v)
    design = np.column_stack([lt, np.ones_like(lt)])
    coef, *_ = np.linalg.lstsq(design, lv, rcond=None)
    resid = lv - design @ coef
    return RateFit(
        exponent=float(coef[0]),
        prefactor=float(np.exp(coef[1])),
        window=(float(t.min()), float(t.max())),
        residual=float(np.sqrt(np.mean(resid**2))),
        samples=int(t.size),
    )


def sup_limit_target(params: PhysParams) -> float:
    """Late-time limit of t * ||u(t)||_inf^alpha; depends only on Im lambda."""
    return (2.0 - params.N * params.alpha) / (2.0 * params.alpha * abs(params.lam.imag))


def check_sup_limit(series: NormSeries, params: PhysParams, tail: int = 5) -> dict:
    """Compare late-time sup-norm growth against its closed-form limit.

    Evaluates t * ||u||_inf^alpha (physical frame) and its rescaled-frame
    companion (1 + bt) * ||u||_inf^alpha at the ``tail`` latest times; both
    converge to targets fixed by (N, alpha, Im lambda, b) alone.
    """
    target_u = sup_limit_target(params)
    target_v = params.b * target_u
    t = np.asarray(series.t, dtype=float)
    linf = np.asarray(series.linf, dtype=float)
    pos = t > 0
    decades = 0.0
    if np.count_nonzero(pos) >= 2:
        decades = float(np.log10(t[pos].max() / t[pos].min()))
    warnings = []
    if decades < 2.0:
        warnings.append(f"series spans {decades:.2f} decades, below the advised 2")
    k = max(1, min(tail, t.size))
    tt, ss = t[-k:], linf[-k:]
    u_vals = tt * ss**params.alpha
    v_vals = (1.0 + params.b * tt) * ss**params.alpha
    return {
        "target_u": target_u,
        "target_v": target_v,
        "tail_times": tt.tolist(),
        "u_values": u_vals.tolist(),
        "v_values": v_vals.tolist(),
        "deviation_u": float(np.max(np.abs(u_vals / target_u - 1.0))),
        "deviation_v": float(np.max(np.abs(v_vals / target_v - 1.0))),
        "decades": decades,
        "warnings": warnings,
    }


def l2_envelope_exponent(params: PhysParams, n: int) -> float:
    """Decay rate of ||u||_L2 forced by an order-n spatial weight on the data."""
    return (1.0 / params.alpha - params.N / 2.0) * (1.0 - params.N / (2.0 * n))


def check_l2_envelope(
    series: NormSeries,
    params: PhysParams,
    n: int,
    window: tuple[float, float] | None = None,
) -> dict:
    """Fit the mass decay rate and squeeze the compensated series.

    The compensated quantity (1+bt)^e * ||u||_L2 with e the predicted rate
    should stay inside a fixed band [a, A]; the report carries the band
    observed over the fit window (default: last decade of t).
    """
    e = l2_envelope_exponent(params, n)
    t = np.asarray(series.t, dtype=float)
    l2 = np.asarray(series.l2, dtype=float)
    if window is None:
        hi = float(t.max())
        window = (hi / 10.0, hi)
    mask = (t >= window[0]) & (t <= window[1]) & (t > 0)
    tw, lw = t[mask], l2[mask]
    comp = (1.0 + params.b * tw) ** e * lw
    fit = fit_power_law(1.0 + params.b * tw, lw)
    return {
        "target_exponent": -e,
        "fitted": fit.as_dict(),
        "exponent_deviation": float(abs((fit.exponent + e) / e)),
        "empirical_a": float(comp.min()),
        "empirical_A": float(comp.max()),
        "band_ratio": float(comp.max() / comp.min()),
        "window": [float(window[0]), float(window[1])],
    }


def _derivative_orders(dim: int, max_order: int) -> list[tuple[int, ...]]:
    if dim == 1:
        return [(j,) for j in range(max_order + 1)]
    return [
        (i, j)
        for i in range(max_order + 1)
        for j in range(max_order + 1 - i)
    ]


@dataclass
class MonitorReport:
    """Truncated weighted running suprema and pointwise-decay classification."""

    times: np.ndarray
    phi1: np.ndarray
    phi3: np.ndarray
    phi4: np.ndarray
    psi: np.ndarray
    f_sup: np.ndarray
    max_order: int
    data_constant: float
    psi_bounded: bool
    f_within_quarter: bool
    decay_pointwise: bool
    label: str = "truncated"
    extras: dict = dc_field(default_factory=dict)

    @property
    def psi_ratio(self) -> float:
        return float(self.psi[-1] / self.psi[0])

    def as_dict(self) -> dict:
        return {
            "times": self.times.tolist(),
            "phi1": self.phi1.tolist(),
            "phi3": self.phi3.tolist(),
            "phi4": self.phi4.tolist(),
            "psi": self.psi.tolist(),
            "f_sup": self.f_sup.tolist(),
            "max_order": self.max_order,
            "data_constant": self.data_constant,
            "psi_bounded": self.psi_bounded,
            "psi_ratio": self.psi_ratio,
            "f_within_quarter": self.f_within_quarter,
            "decay_pointwise": self.decay_pointwise,
            "label": self.label,
            "extras": self.extras,
        }


def monitor_phi(
    traj: Trajectory,
    v0: Field,
    exps: ExponentSet,
    max_order: int = 4,
) -> MonitorReport:
    """Evaluate the weighted running-sup monitors over a rescaled-frame run.

    Per snapshot: the weighted derivative sup ladder (orders <= max_order,
    compensated by gauge^{sigma_j}), the compensated reciprocal of the
    weighted modulus floor, and the logarithmic-derivative ladder; their
    running maxima, and the pointwise two-sided decay check against the
    constructed-data constant.  Flags classify; nothing raises on a broken
    bound since a coefficient below the regime threshold breaks them
    legitimately.
    """
    if traj.frame != "v":
        raise ValueError("monitors are defined on rescaled-frame trajectories")
    if not traj.snapshots:
        raise ValueError("no snapshots")
    p = traj.params
    n = exps.n
    q = (2.0 - p.N * p.alpha) / 2.0
    K = data_bound(v0, n, max_order)
    decay_const = 1.0 + (2.0 - p.N * p.alpha) / (2.0 * p.alpha * abs(p.lam.imag))
    orders = _derivative_orders(v0.grid.dim, max_order)
    bracket_pow = v0.grid.bracket() ** (-n * p.alpha)
    tail_bound = 2.0 * K**p.alpha * bracket_pow

    f_fields = correction_algebraic(traj)
    times, phi1, phi3, phi4, psi, fsup = [], [], [], [], [], []
    r1 = r3 = r4 = 0.0
    decay_ok = True
    for snap, f_fld in zip(traj.snapshots, f_fields):
        g = 1.0 - p.b * snap.t
        mod = np.abs(snap.values)
        now1 = now4 = 0.0
        for beta in orders:
            d = spectral_derivative(snap, beta, max_order, check=False)
            sig = exps.sigma_j(sum(beta))
            now1 = max(now1, g**sig * weighted_sup_norm(d, n))
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where(mod > 0, np.abs(d.values) / mod, np.inf)
            now4 = max(now4, g**sig * float(np.max(ratio)))
        floor, _ = weighted_inf(snap, n)
        now3 = np.inf if floor == 0.0 else g ** (q / p.alpha) / floor
        r1, r3, r4 = max(r1, now1), max(r3, now3), max(r4, now4)
        times.append(snap.t)
        phi1.append(r1)
        phi3.append(r3)
        phi4.append(r4)
        psi.append(max(r1, r3, r4))
        fsup.append(float(np.max(np.abs(f_fld.values))))
        cap = decay_const * np.minimum(
            tail_bound, p.b * horizon_gauge(snap.t, p.b, p.alpha, p.N)
        )
        if np.any(mod**p.alpha > cap * (1.0 + 1e-12)):
            decay_ok = False

    times = np.array(times)
    psi = np.array(psi)
    f_arr = np.array(fsup)
    return MonitorReport(
        times=times,
        phi1=np.array(phi1),
        phi3=np.array(phi3),
        phi4=np.array(phi4),
        psi=psi,
        f_sup=f_arr,
        max_order=max_order,
        data_constant=K,
        psi_bounded=bool(np.isfinite(psi[-1])),
        f_within_quarter=bool(np.max(f_arr) <= 0.25),
        decay_pointwise=decay_ok,
    )


def mass_dissipation_ok(traj: Trajectory, slack: float = 1e-12) -> tuple[bool, float]:
    """Check per-step mass monotonicity; returns (ok, worst relative growth)."""
    l2 = np.asarray(traj.l2, dtype=float)
    if l2.size < 2:
        return True, 0.0
    growth = (l2[1:] - l2[:-1]) / np.where(l2[:-1] > 0, l2[:-1], 1.0)
    worst = float(np.max(growth))
    return bool(np.all(growth <= slack)), worst


def emit_report(
    out_dir,
    traj: Trajectory,
    monitor: MonitorReport | None = None,
    fits: dict[str, RateFit] | None = None,
    checks: dict[str, dict] | None = None,
    profile_meta: dict | None = None,
    stem: str = "report",
) -> tuple[Path, Path]:
    """Write <stem>.json (reports) and <stem>.csv (per-snapshot series).

    CSV columns: t, gauge (rescaled frame; empty otherwise), l2, linf, then
    phi1/phi3/phi4/psi/f_sup when a monitor report is attached.  One row per
    snapshot.
    """
    if not traj.snapshots:
        raise ValueError("no snapshots")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = traj.params

    rows = []
    for i, snap in enumerate(traj.snapshots):
        row = {
            "t": snap.t,
            "gauge": 1.0 - p.b * snap.t if traj.frame == "v" else "",
            "l2": l2_norm(snap),
            "linf": sup_norm(snap),
        }
        if monitor is not None:
            row.update(
                phi1=monitor.phi1[i],
                phi3=monitor.phi3[i],
                phi4=monitor.phi4[i],
                psi=monitor.psi[i],
                f_sup=monitor.f_sup[i],
            )
        rows.append(row)

    csv_path = out / f"{stem}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)

    doc = {
        "schema_version": REPORT_SCHEMA,
        "frame": traj.frame,
        "params": {
            "N": p.N,
            "alpha": p.alpha,
            "lam_re": p.lam.real,
            "lam_im": p.lam.imag,
            "b": p.b,
        },
        "snapshots": len(traj.snapshots),
        "monitor": monitor.as_dict() if monitor is not None else None,
        "fits": {k: v.as_dict() for k, v in (fits or {}).items()},
        "checks": checks or {},
        "profile": profile_meta,
    }
    json_path = out / f"{stem}.json"
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=2)
    return json_path, csv_path


def load_report(json_path) -> dict:
    with open(json_path) as fh:
        return json.load(fh)
