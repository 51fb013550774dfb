"""Method-of-lines evolution in physical coordinates with blowup detection.

RK4 in time over second-order finite differences in radius.  The angle
form pins the field to 0 at the origin; the semilinear form uses the even
extension there.  The outer boundary uses one-sided stencils: runs are
set up so that the region of interest stays causally separated from it.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels, model
from .profile import (
    profile_constants,
    profile_angle,
    angle_over_radius,
    profile_angle_slope,
)

_P = profile_constants(5)

DEFAULT_GRADIENT_CEILING = 1e4


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial grid with node 0 at r = 0."""

    r_max: float
    n: int

    def __post_init__(self):
        if self.r_max <= 0.0:
            raise ValueError("r_max must be positive")
        if self.n < 64:
            raise ValueError("need at least 64 cells")

    @property
    def spacing(self) -> float:
        return self.r_max / self.n

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n + 1)


@dataclass
class FieldState:
    """Radial snapshot of the field and its time derivative."""

    t: float
    field: np.ndarray
    field_t: np.ndarray


@dataclass
class Trajectory:
    states: list[FieldState]
    origin_times: np.ndarray
    origin_gradient: np.ndarray
    truncated: bool = False
    reason: str = ""


@dataclass(frozen=True)
class BlowupReport:
    detected: bool
    T_fit: float
    c_fit: float
    exponent_fit: float
    residual: float
    window: tuple[float, float]


def exact_blowup_angle(grid: RadialGrid, t: float, T: float = 1.0) -> FieldState:
    """Snapshot of the exact self-similar angle at time t (blowup time T)."""
    r = grid.nodes
    rho = r / (T - t)
    psi = profile_angle(_P, rho)
    # d/dt U(r/(T-t)) = rho U'(rho)/(T-t)
    psit = rho * profile_angle_slope(_P, rho) / (T - t)
    return FieldState(t=t, field=psi, field_t=psit)


def exact_blowup_semilinear(grid: RadialGrid, t: float, T: float = 1.0) -> FieldState:
    """Snapshot of the exact self-similar semilinear variable u = psi/r."""
    r = grid.nodes
    rho = r / (T - t)
    u = angle_over_radius(_P, rho) / (T - t)
    # d/dt [(T-t)^-1 Ut(rho)] = (T-t)^-2 (1 + Lambda) Ut(rho) = U'(rho)/(T-t)^2
    ut = profile_angle_slope(_P, rho) / (T - t) ** 2
    return FieldState(t=t, field=u, field_t=ut)


def _smoothstep(x):
    """C-infinity monotone step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(x > 0.0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        g = np.where(x < 1.0, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    return f / (f + g)


def equilibrium_blend(grid: RadialGrid, r_inner: float = 0.05,
                      r_outer: float = 0.9) -> FieldState:
    """Static data joining the vacuum at the origin to the equilibrium pi/2.

    The field equals pi/2 exactly for r >= r_outer, so the open outer
    boundary sits on a static solution and radiates nothing until waves
    from the transition region arrive.  Useful for conservation tests.
    """
    r = grid.nodes
    psi = 0.5 * np.pi * _smoothstep((r - r_inner) / (r_outer - r_inner))
    psi[0] = 0.0
    return FieldState(t=0.0, field=psi, field_t=np.zeros_like(r))


def _origin_gradient_angle(psi, h):
    return (4.0 * psi[1] - psi[2]) / (2.0 * h)


def _rk4(f, y1, y2, dt):
    k1a, k1b = f(y1, y2)
    k2a, k2b = f(y1 + 0.5 * dt * k1a, y2 + 0.5 * dt * k1b)
    k3a, k3b = f(y1 + 0.5 * dt * k2a, y2 + 0.5 * dt * k2b)
    k4a, k4b = f(y1 + dt * k3a, y2 + dt * k3b)
    return (
        y1 + dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a),
        y2 + dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b),
    )


def _evolve(rhs, origin_gradient, init: FieldState, t_end, cfl, h, stride,
            ceiling_factor):
    if not (0.0 < cfl <= 1.0):
        raise SolverError(f"cfl={cfl} outside (0, 1]")
    t0 = init.t
    n_steps = max(1, int(np.ceil((t_end - t0) / (cfl * h))))
    dt = (t_end - t0) / n_steps

    y1 = np.array(init.field, dtype=float)
    y2 = np.array(init.field_t, dtype=float)
    g0 = abs(origin_gradient(y1, y2))
    # floor the reference at O(1) so small-data runs are not cut off by a
    # vanishing initial gradient
    ceiling = ceiling_factor * max(g0, 1.0)

    states = [FieldState(t0, y1.copy(), y2.copy())]
    times = [t0]
    grads = [g0]
    truncated = False
    reason = ""
    for k in range(n_steps):
        y1, y2 = _rk4(rhs, y1, y2, dt)
        t = t0 + (k + 1) * dt
        if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
            truncated, reason = True, "non-finite field (degenerate or unstable)"
            break
        g = abs(origin_gradient(y1, y2))
        times.append(t)
        grads.append(g)
        if (k + 1) % stride == 0 or k == n_steps - 1:
            states.append(FieldState(t, y1.copy(), y2.copy()))
        if g > ceiling:
            truncated, reason = True, "origin gradient exceeded ceiling"
            break
    return Trajectory(
        states=states,
        origin_times=np.array(times),
        origin_gradient=np.array(grads),
        truncated=truncated,
        reason=reason,
    )


def evolve_physical(params: model.ModelParams, grid: RadialGrid, init: FieldState,
                    t_end: float, cfl: float = 0.5, stride: int = 16,
                    ceiling_factor: float = DEFAULT_GRADIENT_CEILING) -> Trajectory:
    """Evolve the angle equation (full or strong-field model)."""
    r = grid.nodes
    h = grid.spacing
    if init.field[0] != 0.0:
        raise SolverError("angle must vanish at the origin")
    if params.model is model.Model.STRONG_FIELD:
        def rhs(y1, y2):
            return kernels.strong_field_psi(y1, y2, r, h)
    elif params.model is model.Model.FULL:
        a = params.alpha * (params.lam**2 if params.lam > 0.0 else 1.0)
        b = params.beta

        def rhs(y1, y2):
            return kernels.full_psi(y1, y2, r, h, a, b)
    else:
        raise SolverError("use evolve_semilinear for the semilinear model")

    def og(y1, y2):
        return _origin_gradient_angle(y1, h)

    return _evolve(rhs, og, init, t_end, cfl, h, stride, ceiling_factor)


def evolve_semilinear(params: model.ModelParams, grid: RadialGrid, init: FieldState,
                      t_end: float, cfl: float = 0.5, stride: int = 16,
                      ceiling_factor: float = DEFAULT_GRADIENT_CEILING) -> Trajectory:
    """Evolve the 7D semilinear form; the field is u = psi/r."""
    r = grid.nodes
    h = grid.spacing
    lam = params.lam

    def rhs(y1, y2):
        return kernels.semilinear_u(y1, y2, r, h, lam)

    def og(y1, y2):
        # d(ru)/dr at 0 equals u(0)
        return y1[0]

    return _evolve(rhs, og, init, t_end, cfl, h, stride, ceiling_factor)


def fit_blowup_rate(trajectory: Trajectory,
                    fit_window_fraction: float = 0.5) -> BlowupReport:
    """Power-law fit |gradient| ~ c (T - t)^p over the trailing window.

    T is selected by golden-section search minimizing the least-squares
    residual of log|gradient| against log(T - t).
    """
    t = trajectory.origin_times
    g = trajectory.origin_gradient
    n = t.size
    i0 = int((1.0 - fit_window_fraction) * n)
    tw, gw = t[i0:], g[i0:]
    if tw.size < 8 or gw[-1] <= 1.5 * gw[0] or np.any(gw <= 0.0):
        return BlowupReport(False, np.nan, np.nan, np.nan, np.nan,
                            (float(t[i0]) if n else np.nan, float(t[-1]) if n else np.nan))
    # require monotone growth up to small noise
    if np.min(np.diff(gw)) < -1e-3 * np.max(np.abs(np.diff(gw))):
        return BlowupReport(False, np.nan, np.nan, np.nan, np.nan,
                            (float(tw[0]), float(tw[-1])))

    logg = np.log(gw)

    def residual(T):
        x = np.log(T - tw)
        coeff, res = np.polynomial.polynomial.polyfit(x, logg, 1, full=True)
        return (np.sqrt(res[0][0] / tw.size) if len(res[0]) else 0.0), coeff

    span = tw[-1] - tw[0]
    lo = tw[-1] + 1e-12
    hi = tw[-1] + 2.0 * span
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c1 = b - invphi * (b - a)
    c2 = a + invphi * (b - a)
    f1, _ = residual(c1)
    f2, _ = residual(c2)
    for _ in range(200):
        if f1 < f2:
            b, c2, f2 = c2, c1, f1
            c1 = b - invphi * (b - a)
            f1, _ = residual(c1)
        else:
            a, c1, f1 = c1, c2, f2
            c2 = a + invphi * (b - a)
            f2, _ = residual(c2)
        if b - a < 1e-12 * max(1.0, b):
            break
    T_fit = 0.5 * (a + b)
    res, coeff = residual(T_fit)
    return BlowupReport(
        detected=True,
        T_fit=float(T_fit),
        c_fit=float(np.exp(coeff[0])),
        exponent_fit=float(coeff[1]),
        residual=float(res),
        window=(float(tw[0]), float(tw[-1])),
    )
