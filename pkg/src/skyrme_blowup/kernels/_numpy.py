"""Pure-numpy evaluation of the hot right-hand sides.

Reference implementation of the method-of-lines spatial operators; the
numba backend mirrors these formulas exactly.  All functions return the
state derivative (d/dt of each field) as a pair of new arrays.

Stencils: second-order central differences in the interior, one-sided
second-order at the outer boundary, and regularity-based limits at the
origin (pinned angle for the quasilinear forms, even extension for the
semilinear variable and the similarity perturbation).
"""

import numpy as np

_TINY = 1e-14


def _d1(f, h):
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    d[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    return d


def _d2(f, h):
    d = np.empty_like(f)
    d[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h**2
    d[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h**2
    return d


def _lap7(f, r, h):
    """Radial Laplacian in 7 dimensions, conservative flux form.

    (r^6 f')'/r^6 keeps the discrete operator symmetric negative-definite
    in the r^6-weighted inner product; the naive f'' + 6f'/r stencil has a
    weakly unstable mode at the first nodes.  Origin: control-volume limit
    14(f1-f0)/h^2; outer boundary: one-sided non-conservative stencil.
    """
    lap = np.empty_like(f)
    rp = (r[1:-1] + 0.5 * h) ** 6
    rm = (r[1:-1] - 0.5 * h) ** 6
    lap[1:-1] = (rp * (f[2:] - f[1:-1]) - rm * (f[1:-1] - f[:-2])) / (
        h**2 * r[1:-1] ** 6
    )
    lap[0] = 14.0 * (f[1] - f[0]) / h**2
    d1 = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    d2 = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h**2
    lap[-1] = d2 + 6.0 * d1 / r[-1]
    return lap


def _guarded_cot_term(psi, quad):
    """cot(psi)*quad with the removable zero-field limit."""
    sin = np.sin(psi)
    degenerate = (np.abs(sin) < _TINY) & (np.abs(quad) < _TINY**2)
    safe = np.where(degenerate, 1.0, sin)
    return np.where(degenerate, 0.0, np.cos(psi) * quad / safe)


def _wm_num(x):
    x2 = x * x
    series = x * x2 * (8.0 / 3.0 + x2 * (-8.0 / 15.0 + x2 * (16.0 / 315.0)))
    return np.where(np.abs(x) < 1e-2, series, 4.0 * x - 2.0 * np.sin(2.0 * x))


def _sf_pieces(z1):
    small = np.abs(z1) < 1e-2
    tiny = np.abs(z1) < _TINY
    safe = np.where(tiny, 1.0, z1)
    cot = np.cos(safe) / np.sin(safe)
    cot = np.where(tiny, 0.0, cot)  # caller pairs this with a vanishing factor
    z2 = z1 * z1
    one_minus = np.where(
        small,
        z2 * (1.0 / 3.0 + z2 * (1.0 / 45.0 + z2 * (2.0 / 945.0))),
        1.0 - z1 * cot,
    )
    cubic = np.where(
        small,
        z1 * z2 * (-5.0 / 3.0 + z2 * (19.0 / 45.0 - z2 * (34.0 / 945.0))),
        1.5 * np.sin(2.0 * z1) - 2.0 * z1 - z2 * cot,
    )
    return cot, one_minus, cubic


def _fsf(z1, z2, z3, r):
    cot, one_minus, cubic = _sf_pieces(z1)
    quad = z3 * z3 - z2 * z2
    first = np.where(np.abs(z1) < _TINY, 0.0, -cot * quad / r)
    return first - 2.0 * one_minus * z2 / r**2 - cubic / r**3


def _gdiff(z1, z2, z3, r):
    return _wm_num(z1) / r**3 - _fsf(z1, z2, z3, r)


def strong_field_psi(psi, psit, r, h):
    """d/dt of (psi, psi_t) for the strong-field angle equation."""
    pr = _d1(psi, h)
    prr = _d2(psi, h)
    dpsit = np.empty_like(psi)
    j = slice(1, None)
    dpsit[j] = (
        prr[j]
        + 2.0 * pr[j] / r[j]
        - _guarded_cot_term(psi[j], psit[j] ** 2 - pr[j] ** 2)
        - 1.5 * np.sin(2.0 * psi[j]) / r[j] ** 2
    )
    dpsit[0] = 0.0
    dpsi = psit.copy()
    dpsi[0] = 0.0
    return dpsi, dpsit


def full_psi(psi, psit, r, h, alpha, beta):
    """d/dt of (psi, psi_t) for the quasilinear equation with couplings
    (alpha, beta); alpha absorbs any lambda^2 factor."""
    pr = _d1(psi, h)
    prr = _d2(psi, h)
    dpsit = np.empty_like(psi)
    j = slice(1, None)
    rj, s2 = r[j], np.sin(psi[j]) ** 2
    principal = alpha + 4.0 * beta * s2 / rj**2
    rhs = (
        principal * prr[j]
        + 4.0 / rj * (alpha + 2.0 * beta * s2 / rj**2) * pr[j]
        - 2.0 * np.sin(2.0 * psi[j]) / rj**2
        * (alpha + beta * (psit[j] ** 2 - pr[j] ** 2 + 3.0 * s2 / rj**2))
    )
    dpsit[j] = rhs / principal
    dpsit[0] = 0.0
    dpsi = psit.copy()
    dpsi[0] = 0.0
    return dpsi, dpsit


def semilinear_u(u, ut, r, h, lam):
    """d/dt of (u, u_t) for the 7D semilinear form with scale lambda."""
    ur = _d1(u, h)
    lap = _lap7(u, r, h)
    dut = np.empty_like(u)
    j = slice(1, None)
    rj = r[j]
    z1, z2, z3 = rj * u[j], rj * ur[j], rj * ut[j]
    dut[j] = lap[j] + _fsf(z1, z2, z3, rj)
    if lam != 0.0:
        dut[j] += lam**2 * _gdiff(z1, z2, z3, rj) / (
            lam**2 + 4.0 * np.sin(z1) ** 2 / rj**2
        )
    # origin: even extension makes u_r(0) = 0
    u0, w0 = u[0], ut[0]
    if abs(u0) > _TINY:
        f0 = -w0 * w0 / u0 + (5.0 / 3.0) * u0**3
        g0 = (u0**3 + w0 * w0 / u0) / (lam**2 + 4.0 * u0 * u0) if lam != 0.0 else 0.0
    else:
        f0, g0 = 0.0, 0.0
    dut[0] = lap[0] + f0 + lam**2 * g0
    return ut.copy(), dut


def similarity(phi1, phi2, rho, h, sigma, u1, du1, u2, fsf0, v1, v2):
    """d/dtau of the perturbation pair in similarity coordinates.

    sigma = lambda*T*exp(-tau) is the instantaneous scale of the
    correction term; the profile arrays (u1, du1, u2), the profile value
    of the nonlinearity fsf0, and the potentials (v1, v2) are precomputed
    on the grid.
    """
    d1 = _d1(phi1, h)
    d2 = _d1(phi2, h)
    lap_all = _lap7(phi1, rho, h)

    dphi1 = -rho * d1 - phi1 + phi2
    dphi2 = np.empty_like(phi2)

    j = slice(1, None)
    rj = rho[j]
    lap = lap_all[j]
    lin = (
        v1[j] * phi1[j]
        + v2[j] * rj * (rj * phi2[j] - d1[j])
    )
    z1 = rj * (u1[j] + phi1[j])
    z2 = rj * (du1[j] + d1[j])
    z3 = rj * (u2[j] + phi2[j])
    nonlin = (
        _fsf(z1, z2, z3, rj)
        - fsf0[j]
        - v1[j] * phi1[j]
        + rj * v2[j] * d1[j]
        - (rj**2 * v2[j] - 2.0) * phi2[j]
    )
    dphi2[j] = lap - rj * d2[j] - 4.0 * phi2[j] + lin + nonlin
    if sigma != 0.0:
        dphi2[j] += sigma**2 * _gdiff(z1, z2, z3, rj) / (
            sigma**2 + 4.0 * np.sin(z1) ** 2 / rj**2
        )

    # origin limits: even extension for phi1; the linearized potential is
    # V1(0)*phi1 + 2*phi2 after cancellation
    c = u1[0]
    v = c + phi1[0]
    w = u2[0] + phi2[0]
    lap0 = lap_all[0]
    n0 = (
        (-w * w / v + (5.0 / 3.0) * v**3)
        - (-c + (5.0 / 3.0) * c**3)
        - v1[0] * phi1[0]
        + 2.0 * phi2[0]
    )
    dphi2[0] = lap0 - 4.0 * phi2[0] + v1[0] * phi1[0] + n0
    if sigma != 0.0:
        dphi2[0] += sigma**2 * (v**3 + w * w / v) / (sigma**2 + 4.0 * v * v)
    # outflow closure at rho = 1: quadratic extrapolation of the tendency;
    # the one-sided wave-operator stencil there supports a spurious
    # growing boundary mode
    dphi1[-1] = 3.0 * dphi1[-2] - 3.0 * dphi1[-3] + dphi1[-4]
    dphi2[-1] = 3.0 * dphi2[-2] - 3.0 * dphi2[-3] + dphi2[-4]
    return dphi1, dphi2
