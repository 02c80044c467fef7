"""Lens between the physical and rescaled frames.

A v-frame state at time s corresponds to a u-frame state at t = s/(1 - b s)
living on the grid stretched by 1 + b t = 1/(1 - b s).  Keeping the u-frame
field on that co-moving grid makes both directions pure pointwise arithmetic
(quadratic chirp times amplitude rescale) with no interpolation, and makes
the L2 norm match exactly: the Jacobian of the stretch cancels the amplitude
factor.  All functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import Field, Grid
from .solver import Trajectory


def physical_time(s, b: float):
    """t = s / (1 - b s); maps [0, 1/b) onto [0, infinity)."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or (b > 0 and np.any(b * s >= 1)):
        raise ValueError("rescaled time must lie in [0, 1/b)")
    out = s / (1.0 - b * s)
    return float(out) if out.ndim == 0 else out


def rescaled_time(t, b: float):
    """s = t / (1 + b t); inverse of :func:`physical_time`."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("physical time must be nonnegative")
    out = t / (1.0 + b * t)
    return float(out) if out.ndim == 0 else out


def to_u_frame(v: Field, b: float) -> Field:
    """Physical-frame field at t = s/(1-bs) on the grid stretched by 1 + bt."""
    if v.frame != "v":
        raise ValueError("expected a v-frame field")
    s = v.t
    if b == 0.0:
        return Field(v.grid, v.values.copy(), "u", s)
    t = physical_time(s, b)
    scale = 1.0 + b * t
    grid_u = v.grid.scaled(scale)
    chirp = np.exp(1j * b * grid_u.radius_sq() / (4.0 * scale))
    vals = scale ** (-grid_u.dim / 2.0) * chirp * v.values
    return Field(grid_u, vals, "u", t)


def to_v_frame(u: Field, b: float, reference: Grid | None = None) -> Field:
    """Inverse of :func:`to_u_frame`; optionally checks the unstretched grid.

    ``reference`` is the v-frame grid the caller expects back; a mismatch
    means the u-frame field does not live on the co-moving stretch of it.
    """
    if u.frame != "u":
        raise ValueError("expected a u-frame field")
    t = u.t
    if t < 0:
        raise ValueError("physical time must be nonnegative")
    if b == 0.0:
        grid_v = u.grid
        vals = u.values.copy()
        s = t
    else:
        scale = 1.0 + b * t
        s = rescaled_time(t, b)
        grid_v = u.grid.scaled(1.0 / scale)
        chirp = np.exp(-1j * b * u.grid.radius_sq() / (4.0 * scale))
        vals = scale ** (u.grid.dim / 2.0) * chirp * u.values
    if reference is not None:
        if grid_v.points != reference.points or not np.allclose(
            grid_v.extents, reference.extents, rtol=1e-9, atol=0.0
        ):
            raise ValueError(
                f"grid mismatch: unstretched extents {grid_v.extents} vs "
                f"reference {reference.extents}"
            )
        grid_v = reference  # adopt the exact reference floats
    return Field(grid_v, vals, "v", s)


@dataclass(frozen=True)
class NormSeries:
    """u-frame norm curves derived from a v-frame run without building u."""

    s: np.ndarray
    t: np.ndarray
    l2: np.ndarray
    linf: np.ndarray


def norm_bridge(traj: Trajectory, b: float | None = None) -> NormSeries:
    """Norm identities: ||u(t)||_2 = ||v(s)||_2, ||u(t)||_inf = (1-bs)^{N/2}||v(s)||_inf."""
    if traj.frame != "v":
        raise ValueError("norm bridge expects a v-frame trajectory")
    if b is None:
        b = traj.params.b
    s = traj.times
    half_dim = traj.snapshots[0].grid.dim / 2.0
    return NormSeries(
        s=s.copy(),
        t=physical_time(s, b),
        l2=traj.l2.copy(),
        linf=traj.linf * (1.0 - b * s) ** half_dim,
    )
