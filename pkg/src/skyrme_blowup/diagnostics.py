"""Norms, rate fitting, and equation-residual checks shared by the solvers.

Everything here is built from independent finite differences (np.gradient)
and quadrature so it can serve as an oracle for the evolution kernels.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from . import model
from .profile import profile_constants, angle_over_radius, profile_angle_slope

_P = profile_constants(5)

MAX_NORM_ORDER = 5


class DiagnosticsError(ValueError):
    pass


def radial_norm(u, grid, k: int = 0, weight_exponent: int = 6) -> float:
    """Weighted Sobolev-type norm (sum over j <= k of the squared L2 norm
    of the j-th radial derivative, weight rho^weight_exponent)^(1/2)."""
    if k < 0 or k > MAX_NORM_ORDER:
        raise DiagnosticsError(f"derivative order k={k} outside [0, {MAX_NORM_ORDER}]")
    u = np.asarray(u, dtype=float)
    grid = np.asarray(grid, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DiagnosticsError("non-finite input")
    w = grid**weight_exponent
    total = 0.0
    du = u
    for j in range(k + 1):
        total += simpson(du * du * w, x=grid)
        if j < k:
            du = np.gradient(du, grid, edge_order=2)
    return float(np.sqrt(total))


@dataclass(frozen=True)
class RateFit:
    exponent: float
    amplitude: float
    residual: float
    window: tuple[float, float]


def fit_exponential_decay(tau, values, window=None) -> RateFit:
    """Least-squares fit of values ~ amplitude * exp(exponent * tau)."""
    tau = np.asarray(tau, dtype=float)
    values = np.asarray(values, dtype=float)
    if window is not None:
        m = (tau >= window[0]) & (tau <= window[1])
        tau, values = tau[m], values[m]
    if tau.size < 2:
        raise DiagnosticsError("need at least two samples in the fit window")
    if np.any(values <= 0.0):
        raise DiagnosticsError("nonpositive values cannot be log-fit")
    y = np.log(values)
    coeff, res = np.polynomial.polynomial.polyfit(tau, y, 1, full=True)
    resid = float(np.sqrt(res[0][0] / tau.size)) if len(res[0]) else 0.0
    return RateFit(
        exponent=float(coeff[1]),
        amplitude=float(np.exp(coeff[0])),
        residual=resid,
        window=(float(tau[0]), float(tau[-1])),
    )


def _trim(x, cells=2):
    return x[cells:-cells]


def _time_derivs(snapshots, dt):
    f_prev, f_mid, f_next = (np.asarray(s, dtype=float) for s in snapshots)
    ft = (f_next - f_prev) / (2.0 * dt)
    ftt = (f_next - 2.0 * f_mid + f_prev) / dt**2
    return f_mid, ft, ftt


def residual_check(equation: str, grid, snapshots=None, dt=None, state=None,
                   params: model.ModelParams | None = None, sigma: float = 0.0) -> float:
    """Max-abs residual of the selected equation over a trimmed interior.

    For the physical equations pass three consecutive snapshots and the
    time step; for the stationary similarity check pass a single
    (phi1, phi2) state on the rho grid.  All derivatives are np.gradient
    finite differences, independent of the solver stencils.
    """
    grid = np.asarray(grid, dtype=float)
    if params is None:
        params = model.ModelParams()

    if equation == "similarity_stationary":
        if state is None:
            raise DiagnosticsError("similarity_stationary requires state=(phi1, phi2)")
        rho = grid
        # full field = profile pair + perturbation, substituted into the
        # autonomous first-order system with all derivatives from np.gradient
        psi1 = angle_over_radius(_P, rho) + np.asarray(state[0], dtype=float)
        psi2 = profile_angle_slope(_P, rho) + np.asarray(state[1], dtype=float)
        d1 = np.gradient(psi1, rho, edge_order=2)
        d2 = np.gradient(psi2, rho, edge_order=2)
        lap = np.gradient(d1, rho, edge_order=2) + 6.0 * d1 / np.where(
            rho > 0, rho, 1.0
        )
        i = slice(2, -2)
        ri = rho[i]
        row1 = -rho * d1 - psi1 + psi2
        fsf = model.strong_field_source(
            ri * psi1[i], ri * d1[i], ri * psi2[i], ri
        )
        row2 = lap[i] - ri * d2[i] - 2.0 * psi2[i] + fsf
        if sigma > 0.0:
            x = ri * psi1[i]
            g = model.source_difference(x, ri * d1[i], ri * psi2[i], ri) / (
                sigma**2 + 4.0 * np.sin(x) ** 2 / ri**2
            )
            row2 = row2 + sigma**2 * g
        return float(max(np.max(np.abs(row1[i])), np.max(np.abs(row2))))

    if snapshots is None or dt is None:
        raise DiagnosticsError(f"{equation} requires snapshots and dt")
    r = grid
    f, ft, ftt = _time_derivs(snapshots, dt)
    fr = np.gradient(f, r, edge_order=2)
    frr = np.gradient(fr, r, edge_order=2)
    i = slice(2, -2)
    ri, fi, fti, fri, frri, ftti = r[i], f[i], ft[i], fr[i], frr[i], ftt[i]

    if equation == "strong_field":
        # cot(psi)*(psi_t^2 - psi_r^2) has a removable limit where the field
        # vanishes identically (0 is a solution); guard that case
        quad = fti**2 - fri**2
        sin = np.sin(fi)
        degenerate = (np.abs(sin) < 1e-14) & (np.abs(quad) < 1e-28)
        with np.errstate(divide="ignore", invalid="ignore"):
            cot_term = np.where(degenerate, 0.0, np.cos(fi) * quad / np.where(degenerate, 1.0, sin))
        res = (
            ftti
            - frri
            - 2.0 * fri / ri
            + cot_term
            + 1.5 * np.sin(2.0 * fi) / ri**2
        )
    elif equation == "full":
        s2 = np.sin(fi) ** 2
        a = params.alpha * (1.0 if params.lam == 0.0 else params.lam**2)
        b = params.beta
        res = (
            (a + 4.0 * b * s2 / ri**2) * (ftti - frri)
            - 4.0 / ri * (a + 2.0 * b * s2 / ri**2) * fri
            + 2.0 * np.sin(2.0 * fi) / ri**2
            * (a + b * (fti**2 - fri**2 + 3.0 * s2 / ri**2))
        )
    elif equation == "semilinear":
        lam = params.lam
        fsf = model.strong_field_source(ri * fi, ri * fri, ri * fti, ri)
        res = ftti - frri - 6.0 * fri / ri - fsf
        if lam > 0.0:
            g = model.source_difference(ri * fi, ri * fri, ri * fti, ri)
            res = res - lam**2 * g * model.scale_weight(ri * fi, ri, lam)
    else:
        raise DiagnosticsError(f"unknown equation '{equation}'")
    return float(np.max(np.abs(res)))
