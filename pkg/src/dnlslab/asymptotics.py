"""Long-time structure of the rescaled flow and the profile it converges to.

The modulus of a rescaled-frame solution obeys an exact pointwise balance:
its alpha-th power equals |v0|^alpha divided by

    1 + f(t,x) + c |v0(x)|^alpha [(1 - b t)^{-(2 - N alpha)/2} - 1],

with c = 2 alpha |Im lam| / (b (2 - N alpha)).  The correction f collects
the dispersive coupling accumulated along the flow; it stays bounded while
the explicit bracket blows up, which is the whole asymptotic mechanism.
This module extracts f from a trajectory two independent ways (inverting
the balance pointwise, and integrating the coupling term in time), freezes
its terminal value f0 together with a limiting amplitude profile, and
evaluates the resulting prediction in both frames, including the weighted
error metrics of the main convergence statement.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .conformal import physical_time, rescaled_time, to_u_frame
from .field import Field, l2_norm, laplacian, load_field, save_field
from .params import PhysParams
from .solver import Trajectory

log = logging.getLogger(__name__)

PROFILE_SCHEMA = 1


class ExtractionError(RuntimeError):
    """Trajectory does not support profile extraction (vanishing modulus, ...)."""


def horizon_gauge(t, b: float, alpha: float, N: int):
    """g/(1-g) with g = (1-bt)^{(2-N alpha)/2}: +inf at t=0, 0 at the horizon.

    The product b * horizon_gauge(t) calibrates when the explicit bracket in
    the modulus balance starts to dominate; callers only ever use it inside
    min{., .} comparisons, so the t = 0 value is returned as np.inf.
    """
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(b * t >= 1):
        raise ValueError("t must lie in [0, 1/b)")
    g = (1.0 - b * t) ** ((2.0 - N * alpha) / 2.0)
    with np.errstate(divide="ignore"):
        out = np.where(g == 1.0, np.inf, g / (1.0 - g))
    return float(out) if out.ndim == 0 else out


def crossover_time(b: float, alpha: float, N: int, tol: float = 1e-12) -> float:
    """Root of b * horizon_gauge(t) = 1, located by bisection."""
    if b <= 0:
        raise ValueError("b must be positive")
    lo, hi = 1e-300, (1.0 - 1e-15) / b
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if b * horizon_gauge(mid, b, alpha, N) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)


def _check_v_traj(traj: Trajectory) -> PhysParams:
    if traj.frame != "v":
        raise ValueError("profile extraction expects a v-frame trajectory")
    p = traj.params
    if p.b <= 0 or p.lam.imag >= 0:
        raise ValueError("extraction needs b > 0 and Im(lambda) < 0")
    return p


def correction_algebraic(traj: Trajectory, v0: Field | None = None) -> list[Field]:
    """Correction fields at every snapshot, by inverting the modulus balance."""
    p = _check_v_traj(traj)
    v0 = traj.snapshots[0] if v0 is None else v0
    q = (2.0 - p.N * p.alpha) / 2.0
    c = 2.0 * p.alpha * abs(p.lam.imag) / (p.b * (2.0 - p.N * p.alpha))
    mod0a = np.abs(v0.values) ** p.alpha
    out = []
    for snap in traj.snapshots:
        mod = np.abs(snap.values)
        if np.min(mod) <= 0.0:
            raise ExtractionError(f"modulus vanishes on the grid at t = {snap.t:.6g}")
        bracket = (1.0 - p.b * snap.t) ** -q - 1.0
        f = mod0a / mod**p.alpha - 1.0 - c * mod0a * bracket
        out.append(Field(snap.grid, f, "v", snap.t))
    return out


def correction_integral(
    traj: Trajectory, v0: Field | None = None
) -> tuple[list[Field], float]:
    """Correction by time-integrating the dispersive coupling; plus a residual.

    Uses the per-step running integral recorded by the solver when present,
    otherwise a trapezoid over the snapshots.  The returned residual is the
    largest sup-distance to the algebraic route over all snapshots — an
    accuracy certificate for the run, since the two agree exactly for the
    continuum flow.
    """
    p = _check_v_traj(traj)
    v0 = traj.snapshots[0] if v0 is None else v0
    mod0a = np.abs(v0.values) ** p.alpha
    if traj.coupling is not None:
        accums = [c.values.real for c in traj.coupling]
    else:
        accums = []
        total = np.zeros(traj.snapshots[0].grid.shape)
        prev_g, prev_t = None, None
        for snap in traj.snapshots:
            mod = np.abs(snap.values)
            if np.min(mod) <= 0.0:
                raise ExtractionError(f"modulus vanishes on the grid at t = {snap.t:.6g}")
            g = np.imag(np.conj(snap.values) * laplacian(snap, check=False).values)
            g = g / mod ** (p.alpha + 2.0)
            if prev_g is not None:
                total = total + 0.5 * (snap.t - prev_t) * (prev_g + g)
            accums.append(total.copy())
            prev_g, prev_t = g, snap.t
    fields = [
        Field(snap.grid, p.alpha * mod0a * acc, "v", snap.t)
        for snap, acc in zip(traj.snapshots, accums)
    ]
    alg = correction_algebraic(traj, v0)
    residual = max(
        float(np.max(np.abs(fi.values - fa.values))) for fi, fa in zip(fields, alg)
    )
    return fields, residual


@dataclass(frozen=True)
class ProfileData:
    """Frozen terminal correction and amplitude, ready for prediction.

    ``correction`` is the terminal correction field (real, on the v-grid),
    ``amplitude`` the complex limiting profile whose alpha-th modulus power
    times (1 + correction) reproduces |v0|^alpha exactly.
    """

    correction: np.ndarray
    amplitude: np.ndarray
    reference: Field
    params: PhysParams
    meta: dict

    @property
    def correction_sup(self) -> float:
        return float(np.max(np.abs(self.correction)))


def _psi_pow_alpha(t: float, correction: np.ndarray, mod0a: np.ndarray, p: PhysParams):
    if t < 0 or p.b * t >= 1:
        raise ValueError("t must lie in [0, 1/b)")
    q = (2.0 - p.N * p.alpha) / 2.0
    c = 2.0 * p.alpha * abs(p.lam.imag) / (p.b * (2.0 - p.N * p.alpha))
    bracket = (1.0 - p.b * t) ** -q - 1.0
    return (1.0 + correction) / (1.0 + correction + c * mod0a * bracket)


def finalize_profile(traj: Trajectory, series: list[Field]) -> ProfileData:
    """Freeze the last correction field and recover the limiting amplitude.

    The amplitude modulus comes from the defining balance; its phase is read
    off the final snapshot after unwinding the predicted envelope and drift,
    which is exactly the decomposition whose remaining factor converges.

    Raises
    ------
    ExtractionError
        If 1 + correction is not positive everywhere (b far too small, or
        the run was unresolved).
    """
    p = _check_v_traj(traj)
    v0 = traj.snapshots[0]
    v_last = traj.snapshots[-1]
    f0 = np.real(series[-1].values)
    if np.min(1.0 + f0) <= 0.0:
        raise ExtractionError(
            f"1 + correction reaches {np.min(1.0 + f0):.3e} <= 0; "
            "b is far below the asymptotic regime or the run is unresolved"
        )
    f0_sup = float(np.max(np.abs(f0)))
    if f0_sup > 0.25:
        log.warning("terminal correction sup %.3f exceeds 1/4; b may be too small", f0_sup)
    mod0 = np.abs(v0.values)
    amp_mod = (mod0**p.alpha / (1.0 + f0)) ** (1.0 / p.alpha)
    mod0a = mod0**p.alpha
    psi_a = _psi_pow_alpha(v_last.t, f0, mod0a, p)
    theta = (p.lam.real / p.lam.imag) * np.log(psi_a) / p.alpha
    phase = np.angle(v_last.values * np.exp(1j * theta))
    meta = {
        "final_time": v_last.t,
        "final_gauge": 1.0 - p.b * v_last.t,
        "correction_sup": f0_sup,
        "series_len": len(series),
    }
    return ProfileData(f0, amp_mod * np.exp(1j * phase), v0, p, meta)


def modulus_envelope(t: float, profile: ProfileData) -> np.ndarray:
    """Envelope by which the amplitude is squeezed between time 0 and t."""
    p = profile.params
    mod0a = np.abs(profile.reference.values) ** p.alpha
    psi = _psi_pow_alpha(t, profile.correction, mod0a, p) ** (1.0 / p.alpha)
    if profile.correction_sup < 1.0:
        assert np.all(psi > 0.0) and np.all(psi <= 1.0 + 1e-12)
    return psi


def phase_drift(t: float, profile: ProfileData) -> np.ndarray:
    """Accumulated nonlinear phase; identically zero for purely imaginary lam."""
    p = profile.params
    if p.lam.real == 0.0:
        return np.zeros(profile.reference.grid.shape)
    mod0a = np.abs(profile.reference.values) ** p.alpha
    psi_a = _psi_pow_alpha(t, profile.correction, mod0a, p)
    return (p.lam.real / p.lam.imag) * np.log(psi_a) / p.alpha


def predicted_field_v(s: float, profile: ProfileData) -> Field:
    """Rescaled-frame prediction amplitude * envelope * exp(-i drift) at time s."""
    psi = modulus_envelope(s, profile)
    theta = phase_drift(s, profile)
    vals = profile.amplitude * psi * np.exp(-1j * theta)
    return Field(profile.reference.grid, vals, "v", s)


def predicted_field(t: float, profile: ProfileData) -> Field:
    """Physical-frame prediction at time t, on the co-moving grid."""
    s = rescaled_time(t, profile.params.b)
    return to_u_frame(predicted_field_v(s, profile), profile.params.b)


def error_metric(u: Field, profile: ProfileData) -> tuple[float, float]:
    """Weighted gaps (t^{1/alpha - N/2} ||u - z||_2, t^{1/alpha} ||u - z||_inf).

    ``u`` must live on the co-moving stretch of the profile grid and satisfy
    t >= 1, the range where the convergence statement applies.
    """
    p = profile.params
    if u.frame != "u":
        raise ValueError("expected a u-frame field")
    if u.t < 1.0:
        raise ValueError("error metric is defined for t >= 1")
    z = predicted_field(u.t, profile)
    if z.grid.points != u.grid.points or not np.allclose(
        z.grid.extents, u.grid.extents, rtol=1e-9, atol=0.0
    ):
        raise ValueError("field is not on the co-moving stretch of the profile grid")
    diff = u.values - z.values
    e2 = u.t ** (1.0 / p.alpha - p.N / 2.0) * l2_norm(Field(u.grid, diff, "u", u.t))
    einf = u.t ** (1.0 / p.alpha) * float(np.max(np.abs(diff)))
    return e2, einf


def save_profile(profile: ProfileData, dirpath) -> Path:
    """Persist a profile as three field snapshots plus JSON metadata."""
    root = Path(dirpath)
    root.mkdir(parents=True, exist_ok=True)
    g = profile.reference.grid
    t_last = float(profile.meta.get("final_time", 0.0))
    save_field(Field(g, profile.correction.astype(complex), "v", t_last), root / "correction")
    save_field(Field(g, profile.amplitude.astype(complex), "v", t_last), root / "amplitude")
    save_field(profile.reference, root / "reference")
    p = profile.params
    head = {
        "schema_version": PROFILE_SCHEMA,
        "params": {"N": p.N, "alpha": p.alpha, "lam": [p.lam.real, p.lam.imag], "b": p.b},
        "meta": profile.meta,
    }
    (root / "profile.json").write_text(json.dumps(head, sort_keys=True, indent=2) + "\n")
    return root


def load_profile(dirpath) -> ProfileData:
    root = Path(dirpath)
    head = json.loads((root / "profile.json").read_text())
    if head.get("schema_version") != PROFILE_SCHEMA:
        raise ValueError(f"unsupported profile schema {head.get('schema_version')}")
    pp = head["params"]
    params = PhysParams(int(pp["N"]), float(pp["alpha"]),
                        complex(pp["lam"][0], pp["lam"][1]), float(pp["b"]))
    correction = np.real(load_field(root / "correction").values)
    amplitude = load_field(root / "amplitude").values
    reference = load_field(root / "reference")
    return ProfileData(correction, amplitude, reference, params, dict(head["meta"]))
