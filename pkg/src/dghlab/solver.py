"""Semidiscrete right-hand sides for the DGH equation and explicit time stepping.

The equation is stepped in its nonlocal form, which eliminates third
derivatives: with the momentum ``m = u - u_xx`` and the Helmholtz inverse
written as a Green's-function convolution,

    u_t = -(u - gamma) u_x
          - d/dx Lambda^{-2} ( u^2 + u_x^2 / 2 + (2 omega + gamma) u ).

For ``gamma = -2 omega`` this reduces to the advective form
``u_t + (u + 2 omega) u_x = -d/dx Lambda^{-2}(u^2 + u_x^2/2)``.

The weakly dissipative variant adds a damping ``lambda * (u - u_xx)`` to the
momentum balance, i.e. simply ``-lambda * u`` after inverting the Helmholtz
operator.

Quadratic products on periodic grids are dealiased with the 2/3 rule.  Time
integration is the classical four-stage Runge-Kutta scheme with a gradient
guard that converts wave breaking into a measurable event.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .grid import Field, Grid, NonFiniteFieldError, derivative
from .helmholtz import KernelSpec, apply_lambda2, dx_invert_lambda2

__all__ = [
    "CflWarning",
    "ManufacturedSolution",
    "NonFiniteError",
    "PhysParams",
    "SimConfig",
    "Termination",
    "Trajectory",
    "manufactured_forcing",
    "rhs_dissipative",
    "rhs_nonlocal",
    "simulate",
    "step_rk4",
]


class CflWarning(UserWarning):
    """Time step exceeds the advisory CFL bound (run continues)."""


# Raised by Field construction when a step produces NaN/Inf values.
NonFiniteError = NonFiniteFieldError


@dataclass(frozen=True)
class PhysParams:
    """Model constants: linear dispersion omega, third-order dispersion gamma,
    and the non-negative weak-dissipation rate lam (0 = conservative)."""

    omega: float
    gamma: float
    lam: float = 0.0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"dissipation rate must be non-negative, got {self.lam}")


@dataclass(frozen=True)
class SimConfig:
    grid: Grid
    params: PhysParams
    dt: float
    t_end: float
    snapshot_stride: int = 1
    blowup_guard: float = 1e3

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end <= 0:
            raise ValueError("t_end must be positive")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        if self.blowup_guard <= 0:
            raise ValueError("blowup_guard must be positive")


class Termination(enum.Enum):
    COMPLETED = "completed"
    BLOWUP_GUARD = "blowup_guard"
    NON_FINITE = "non_finite"


@dataclass(frozen=True)
class Trajectory:
    """Snapshots (t, u) of one run, with strictly increasing times from t = 0."""

    config: SimConfig
    times: np.ndarray
    snapshots: tuple[Field, ...]
    termination: Termination
    guard_time: Optional[float] = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        if t.size != len(self.snapshots):
            raise ValueError("times and snapshots disagree in length")
        if t.size == 0 or t[0] != 0.0 or np.any(np.diff(t) <= 0):
            raise ValueError("snapshot times must increase strictly from t = 0")
        object.__setattr__(self, "times", t)

    @property
    def grid(self) -> Grid:
        return self.config.grid

    def values_matrix(self) -> np.ndarray:
        """Snapshot values stacked into an array of shape (n_snapshots, n)."""
        return np.stack([s.values for s in self.snapshots])

    def subsample(self, step: int) -> "Trajectory":
        """Every step-th snapshot (the first one always included)."""
        idx = list(range(0, len(self.snapshots), step))
        if idx[-1] != len(self.snapshots) - 1:
            idx.append(len(self.snapshots) - 1)
        return replace(
            self,
            times=self.times[idx],
            snapshots=tuple(self.snapshots[i] for i in idx),
        )


def _dealias(grid: Grid, vals: np.ndarray) -> np.ndarray:
    """Zero the top third of the spectrum (2/3 rule for quadratic products)."""
    coef = np.fft.rfft(vals)
    k = np.fft.rfftfreq(grid.n, d=grid.spacing)
    coef[k > grid.n / 3.0] = 0.0
    return np.fft.irfft(coef, n=grid.n)


def rhs_nonlocal(
    u: Field,
    p: PhysParams,
    spec: KernelSpec | None = None,
    return_momentum: bool = False,
):
    """Conservative time derivative of u in the nonlocal form.

    The dissipation rate in ``p`` is ignored here.  With ``return_momentum``
    the momentum ``u - u_xx`` is returned alongside for consumers that track
    it.
    """
    grid = u.grid
    ux = derivative(u, 1)
    if grid.is_periodic:
        advect = _dealias(grid, u.values * ux.values)
        quad = _dealias(grid, u.values**2 + 0.5 * ux.values**2)
    else:
        advect = u.values * ux.values
        quad = u.values**2 + 0.5 * ux.values**2
    arg = Field(grid, quad + (2.0 * p.omega + p.gamma) * u.values)
    nonlocal_term = dx_invert_lambda2(arg, spec)
    du = Field(grid, -advect + p.gamma * ux.values - nonlocal_term.values)
    if return_momentum:
        return du, apply_lambda2(u)
    return du


def rhs_dissipative(
    u: Field,
    p: PhysParams,
    spec: KernelSpec | None = None,
):
    """Weakly dissipative time derivative: the conservative part minus lam * u."""
    du = rhs_nonlocal(u, p, spec)
    if p.lam == 0.0:
        return du
    return Field(u.grid, du.values - p.lam * u.values)


RhsFn = Callable[[float, Field], Field]


def step_rk4(u: Field, t: float, dt: float, rhs: RhsFn) -> Field:
    """One classical Runge-Kutta step; parameters are bound into ``rhs(t, u)``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    k1 = rhs(t, u)
    k2 = rhs(t + 0.5 * dt, u + (0.5 * dt) * k1)
    k3 = rhs(t + 0.5 * dt, u + (0.5 * dt) * k2)
    k4 = rhs(t + dt, u + dt * k3)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def cfl_bound(grid: Grid, params: PhysParams, u0: Field) -> float:
    """Advisory time-step bound 0.5 h / (max|u0| + |gamma| + 2|omega| + 1)."""
    speed = u0.max_abs() + abs(params.gamma) + 2.0 * abs(params.omega) + 1.0
    return 0.5 * grid.spacing / speed


def _check_cfl(config: SimConfig, u0: Field) -> None:
    bound = cfl_bound(config.grid, config.params, u0)
    if config.dt > 2.0 * bound:
        raise ValueError(
            f"dt = {config.dt:g} exceeds twice the advisory CFL bound {bound:g}"
        )
    if config.dt > bound:
        warnings.warn(
            f"dt = {config.dt:g} exceeds the advisory CFL bound {bound:g}; "
            "the run proceeds but accuracy should be checked by refinement",
            CflWarning,
            stacklevel=3,
        )


ForcingFn = Callable[[float], np.ndarray]


def simulate(
    config: SimConfig,
    u0: Field,
    forcing: ForcingFn | None = None,
    rhs: RhsFn | None = None,
) -> Trajectory:
    """Integrate from u0 to t_end, or stop early on a gradient guard / NaN.

    The right-hand side defaults to the dissipative form when the
    configuration carries a positive dissipation rate and to the conservative
    form otherwise.  ``forcing(t)`` values, when given, are added to du/dt.
    """
    if u0.grid != config.grid:
        raise ValueError("initial data lives on a different grid than the config")
    _check_cfl(config, u0)
    dt, t_end = config.dt, config.t_end
    n_steps = int(round(t_end / dt))
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, abs(t_end)):
        raise ValueError(f"t_end = {t_end:g} is not an integer number of dt = {dt:g} steps")

    p = config.params
    if rhs is None:
        if p.lam > 0:
            base = lambda t, u: rhs_dissipative(u, p)
        else:
            base = lambda t, u: rhs_nonlocal(u, p)
    else:
        base = rhs
    if forcing is None:
        rhs_t = base
    else:
        rhs_t = lambda t, u: Field(u.grid, base(t, u).values + forcing(t))

    times = [0.0]
    snaps = [u0]
    termination = Termination.COMPLETED
    guard_time = None
    u = u0
    for step in range(1, n_steps + 1):
        t_prev = (step - 1) * dt
        try:
            u = step_rk4(u, t_prev, dt, rhs_t)
        except NonFiniteFieldError:
            # Field validation caught NaN/Inf: keep the finite prefix.
            termination = Termination.NON_FINITE
            break
        t_now = step * dt
        record = step % config.snapshot_stride == 0 or step == n_steps
        gmax = derivative(u, 1).max_abs()
        if gmax > config.blowup_guard:
            termination = Termination.BLOWUP_GUARD
            guard_time = t_now
            record = True
        if record:
            times.append(t_now)
            snaps.append(u)
        if termination is Termination.BLOWUP_GUARD:
            break
    return Trajectory(config, np.asarray(times), tuple(snaps), termination, guard_time)


@dataclass(frozen=True)
class ManufacturedSolution:
    """Closed-form space-time field u(t, x) with its exact time derivative."""

    u: Callable[[float, np.ndarray], np.ndarray]
    u_t: Callable[[float, np.ndarray], np.ndarray]

    @classmethod
    def from_sympy(cls, expr, t_symbol, x_symbol) -> "ManufacturedSolution":
        import sympy

        u_fn = sympy.lambdify((t_symbol, x_symbol), expr, modules="numpy")
        ut_fn = sympy.lambdify(
            (t_symbol, x_symbol), sympy.diff(expr, t_symbol), modules="numpy"
        )
        return cls(
            u=lambda t, x: np.broadcast_to(u_fn(t, x), x.shape).astype(float),
            u_t=lambda t, x: np.broadcast_to(ut_fn(t, x), x.shape).astype(float),
        )

    def field(self, grid: Grid, t: float) -> Field:
        return Field(grid, self.u(t, grid.nodes))


def manufactured_forcing(
    exact: ManufacturedSolution, p: PhysParams, grid: Grid
) -> ForcingFn:
    """Source term making ``exact`` an exact solution of the forced system.

    The residual is evaluated with the same conservative right-hand side that
    the solver steps, plus the analytic time derivative of the exact field.
    """

    def forcing(t: float) -> np.ndarray:
        u_star = exact.field(grid, t)
        return exact.u_t(t, grid.nodes) - rhs_nonlocal(u_star, p).values

    return forcing
