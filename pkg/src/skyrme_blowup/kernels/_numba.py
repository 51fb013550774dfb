"""Numba-compiled evaluation of the hot right-hand sides.

Same formulas and stencils as the pure-numpy backend, written as scalar
loops so numba can compile them to tight machine code.
"""

import math

import numpy as np
from numba import njit

_TINY = 1e-14


@njit(cache=True)
def _wm_num(x):
    x2 = x * x
    if abs(x) < 1e-2:
        return x * x2 * (8.0 / 3.0 + x2 * (-8.0 / 15.0 + x2 * (16.0 / 315.0)))
    return 4.0 * x - 2.0 * math.sin(2.0 * x)


@njit(cache=True)
def _fsf(z1, z2, z3, r):
    za = abs(z1)
    zz = z1 * z1
    if za < 1e-2:
        one_minus = zz * (1.0 / 3.0 + zz * (1.0 / 45.0 + zz * (2.0 / 945.0)))
        cubic = z1 * zz * (-5.0 / 3.0 + zz * (19.0 / 45.0 - zz * (34.0 / 945.0)))
        if za < _TINY:
            first = 0.0
        else:
            first = -(math.cos(z1) / math.sin(z1)) * (z3 * z3 - z2 * z2) / r
    else:
        cot = math.cos(z1) / math.sin(z1)
        one_minus = 1.0 - z1 * cot
        cubic = 1.5 * math.sin(2.0 * z1) - 2.0 * z1 - zz * cot
        first = -cot * (z3 * z3 - z2 * z2) / r
    return first - 2.0 * one_minus * z2 / (r * r) - cubic / (r * r * r)


@njit(cache=True)
def _gdiff(z1, z2, z3, r):
    return _wm_num(z1) / (r * r * r) - _fsf(z1, z2, z3, r)


@njit(cache=True)
def _d1_at(f, j, n, h):
    if j == 0:
        return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    if j == n - 1:
        return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
    return (f[j + 1] - f[j - 1]) / (2.0 * h)


@njit(cache=True)
def _d2_at(f, j, n, h):
    if j == 0:
        return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (h * h)
    if j == n - 1:
        return (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h)
    return (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (h * h)


@njit(cache=True)
def _lap7_at(f, j, n, r, h):
    # conservative flux form of f'' + 6f'/r (see the numpy backend)
    if j == 0:
        return 14.0 * (f[1] - f[0]) / (h * h)
    if j == n - 1:
        d1 = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h)
        d2 = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / (h * h)
        return d2 + 6.0 * d1 / r[n - 1]
    rp = (r[j] + 0.5 * h) ** 6
    rm = (r[j] - 0.5 * h) ** 6
    return (rp * (f[j + 1] - f[j]) - rm * (f[j] - f[j - 1])) / (h * h * r[j] ** 6)


@njit(cache=True)
def strong_field_psi(psi, psit, r, h):
    n = psi.shape[0]
    dpsi = np.empty(n)
    dpsit = np.empty(n)
    dpsi[0] = 0.0
    dpsit[0] = 0.0
    for j in range(1, n):
        pr = _d1_at(psi, j, n, h)
        prr = _d2_at(psi, j, n, h)
        quad = psit[j] * psit[j] - pr * pr
        sin = math.sin(psi[j])
        if abs(sin) < _TINY and abs(quad) < _TINY * _TINY:
            cot_term = 0.0
        else:
            cot_term = math.cos(psi[j]) * quad / sin
        dpsi[j] = psit[j]
        dpsit[j] = (
            prr
            + 2.0 * pr / r[j]
            - cot_term
            - 1.5 * math.sin(2.0 * psi[j]) / (r[j] * r[j])
        )
    return dpsi, dpsit


@njit(cache=True)
def full_psi(psi, psit, r, h, alpha, beta):
    n = psi.shape[0]
    dpsi = np.empty(n)
    dpsit = np.empty(n)
    dpsi[0] = 0.0
    dpsit[0] = 0.0
    for j in range(1, n):
        pr = _d1_at(psi, j, n, h)
        prr = _d2_at(psi, j, n, h)
        rj = r[j]
        s2 = math.sin(psi[j]) ** 2
        principal = alpha + 4.0 * beta * s2 / (rj * rj)
        rhs = (
            principal * prr
            + 4.0 / rj * (alpha + 2.0 * beta * s2 / (rj * rj)) * pr
            - 2.0 * math.sin(2.0 * psi[j]) / (rj * rj)
            * (alpha + beta * (psit[j] * psit[j] - pr * pr + 3.0 * s2 / (rj * rj)))
        )
        dpsi[j] = psit[j]
        dpsit[j] = rhs / principal
    return dpsi, dpsit


@njit(cache=True)
def semilinear_u(u, ut, r, h, lam):
    n = u.shape[0]
    du = np.empty(n)
    dut = np.empty(n)
    for j in range(1, n):
        ur = _d1_at(u, j, n, h)
        rj = r[j]
        z1 = rj * u[j]
        z2 = rj * ur
        z3 = rj * ut[j]
        val = _lap7_at(u, j, n, r, h) + _fsf(z1, z2, z3, rj)
        if lam != 0.0:
            sin = math.sin(z1)
            val += (
                lam * lam * _gdiff(z1, z2, z3, rj)
                / (lam * lam + 4.0 * sin * sin / (rj * rj))
            )
        du[j] = ut[j]
        dut[j] = val
    u0 = u[0]
    w0 = ut[0]
    lap0 = _lap7_at(u, 0, n, r, h)
    f0 = 0.0
    g0 = 0.0
    if abs(u0) > _TINY:
        f0 = -w0 * w0 / u0 + (5.0 / 3.0) * u0**3
        if lam != 0.0:
            g0 = (u0**3 + w0 * w0 / u0) / (lam * lam + 4.0 * u0 * u0)
    du[0] = ut[0]
    dut[0] = lap0 + f0 + lam * lam * g0
    return du, dut


@njit(cache=True)
def similarity(phi1, phi2, rho, h, sigma, u1, du1, u2, fsf0, v1, v2):
    n = phi1.shape[0]
    dphi1 = np.empty(n)
    dphi2 = np.empty(n)
    for j in range(1, n):
        d1 = _d1_at(phi1, j, n, h)
        d2 = _d1_at(phi2, j, n, h)
        rj = rho[j]
        dphi1[j] = -rj * d1 - phi1[j] + phi2[j]
        lap = _lap7_at(phi1, j, n, rho, h)
        lin = v1[j] * phi1[j] + v2[j] * rj * (rj * phi2[j] - d1)
        z1 = rj * (u1[j] + phi1[j])
        z2 = rj * (du1[j] + d1)
        z3 = rj * (u2[j] + phi2[j])
        nonlin = (
            _fsf(z1, z2, z3, rj)
            - fsf0[j]
            - v1[j] * phi1[j]
            + rj * v2[j] * d1
            - (rj * rj * v2[j] - 2.0) * phi2[j]
        )
        val = lap - rj * d2 - 4.0 * phi2[j] + lin + nonlin
        if sigma != 0.0:
            sin = math.sin(z1)
            val += (
                sigma * sigma * _gdiff(z1, z2, z3, rj)
                / (sigma * sigma + 4.0 * sin * sin / (rj * rj))
            )
        dphi2[j] = val
    c = u1[0]
    v = c + phi1[0]
    w = u2[0] + phi2[0]
    lap0 = _lap7_at(phi1, 0, n, rho, h)
    n0 = (
        (-w * w / v + (5.0 / 3.0) * v**3)
        - (-c + (5.0 / 3.0) * c**3)
        - v1[0] * phi1[0]
        + 2.0 * phi2[0]
    )
    dphi1[0] = -phi1[0] + phi2[0]
    dphi2[0] = lap0 - 4.0 * phi2[0] + v1[0] * phi1[0] + n0
    if sigma != 0.0:
        dphi2[0] += sigma * sigma * (v**3 + w * w / v) / (sigma * sigma + 4.0 * v * v)
    # outflow closure at rho = 1 (see the numpy backend)
    dphi1[n - 1] = 3.0 * dphi1[n - 2] - 3.0 * dphi1[n - 3] + dphi1[n - 4]
    dphi2[n - 1] = 3.0 * dphi2[n - 2] - 3.0 * dphi2[n - 3] + dphi2[n - 4]
    return dphi1, dphi2
