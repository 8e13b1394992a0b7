"""Exponential time rescaling between damped and conservative dynamics.

The weakly damped flow (momentum balance plus ``lambda * (u - u_xx)``) maps
onto a conservative flow through

    u(t, x) = exp(-lambda t) * v(tau, x),   tau = (1 - exp(-lambda t)) / lambda,

so a damped run over all t >= 0 corresponds to a conservative run over the
bounded horizon tau < 1/lambda.  The mapping is exact for the drift-free
member of the family (third-order dispersion coefficient zero); with a
nonzero drift coefficient the drift term picks up a factor exp(lambda t)
under the substitution, so the transformed equation is autonomous only in
that drift-free case.  ``map_solution`` applies the change of variables for
any parameters and the equivalence experiment quantifies the match.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .grid import Field, integrate
from .solver import Trajectory

__all__ = [
    "EquivalenceReport",
    "TransformSpec",
    "equivalence_report",
    "map_solution",
    "to_conservative_time",
]

_SMALL_LAMBDA = 1e-8


@dataclass(frozen=True)
class TransformSpec:
    """Damping rate and dissipative-time horizon of one transform application."""

    lam: float
    t_max: float

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("the transform needs a positive damping rate")
        if self.t_max <= 0:
            raise ValueError("t_max must be positive")

    @property
    def tau_max(self) -> float:
        """Conservative horizon; strictly below 1/lam."""
        return float(to_conservative_time(self.t_max, self.lam))


def to_conservative_time(t, lam: float):
    """tau = (1 - exp(-lam t)) / lam, with a series branch for tiny lam."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("t must be non-negative")
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if lam < _SMALL_LAMBDA:
        out = t - lam * t**2 / 2.0 + lam**2 * t**3 / 6.0
    else:
        out = -np.expm1(-lam * t) / lam
    return out if out.ndim else float(out)


def map_solution(conservative: Trajectory, lam: float, times=None) -> Trajectory:
    """Damped-time snapshots u(t, x) = exp(-lam t) v(tau(t), x).

    ``v`` is interpolated cubically in tau between the conservative snapshots.
    The requested times (default: images of the conservative snapshot times)
    must map into the covered tau range.
    """
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if lam == 0.0:
        return conservative
    tau_grid = conservative.times
    if times is None:
        # Inverse images of the stored tau values; all lie below 1/lam.
        if tau_grid[-1] * lam >= 1.0:
            raise ValueError("conservative horizon reaches 1/lam; cannot invert the clock")
        times = -np.log1p(-lam * tau_grid) / lam
        times[0] = 0.0
    times = np.asarray(times, dtype=float)
    tau = to_conservative_time(times, lam)
    if np.any(tau > tau_grid[-1] + 1e-12):
        raise ValueError(
            f"requested times reach tau = {np.max(tau):g}, but the conservative "
            f"run only covers tau <= {tau_grid[-1]:g}"
        )
    spline = CubicSpline(tau_grid, conservative.values_matrix(), axis=0)
    damp = np.exp(-lam * times)
    grid = conservative.grid
    snaps = tuple(
        Field(grid, damp[k] * spline(min(tau[k], tau_grid[-1])))
        for k in range(times.size)
    )
    cfg = replace(conservative.config, params=replace(conservative.config.params, lam=lam))
    return Trajectory(cfg, times, snaps, conservative.termination, conservative.guard_time)


@dataclass(frozen=True)
class EquivalenceReport:
    """Per-time differences between two trajectories on the same grid."""

    times: np.ndarray
    max_abs: np.ndarray
    l2: np.ndarray

    @property
    def worst(self) -> float:
        return float(np.max(self.max_abs)) if self.max_abs.size else 0.0


def equivalence_report(direct: Trajectory, mapped: Trajectory) -> EquivalenceReport:
    """Compare two runs snapshot-by-snapshot after aligning their times."""
    if direct.grid != mapped.grid:
        raise ValueError("trajectories live on different grids")
    # Align on (numerically) common times.
    idx_pairs = []
    j = 0
    for i, t in enumerate(direct.times):
        while j < len(mapped.times) and mapped.times[j] < t - 1e-9:
            j += 1
        if j < len(mapped.times) and abs(mapped.times[j] - t) <= 1e-9:
            idx_pairs.append((i, j))
    if not idx_pairs:
        raise ValueError("trajectories share no snapshot times")
    times = np.array([direct.times[i] for i, _ in idx_pairs])
    max_abs = np.empty(len(idx_pairs))
    l2 = np.empty(len(idx_pairs))
    for k, (i, j) in enumerate(idx_pairs):
        diff = direct.snapshots[i].values - mapped.snapshots[j].values
        max_abs[k] = np.max(np.abs(diff))
        l2[k] = np.sqrt(integrate(Field(direct.grid, diff**2)))
    return EquivalenceReport(times, max_abs, l2)
