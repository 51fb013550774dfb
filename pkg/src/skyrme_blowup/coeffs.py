"""Linearization potentials and Taylor coefficients of the scale correction.

Closed forms for the two potentials of the linearized similarity system and
for the zeroth/first-order Taylor coefficients of the correction
nonlinearity, together with an independent finite-difference verification
against the full nonlinearity built from the model sources.
"""

from dataclasses import dataclass

import numpy as np

from . import model
from .profile import profile_constants, angle_over_radius, profile_angle_slope

_P = profile_constants(5)


def value_potential(rho):
    """Potential multiplying the field itself in the linearized system."""
    rho = np.asarray(rho, dtype=float)
    s = rho * rho
    num = 21.0 * s**3 - 375.0 * s**2 + 1455.0 * s - 2125.0
    out = -5.0 * num / ((5.0 + 3.0 * s) ** 2 * (5.0 - s) ** 2)
    return float(out) if out.ndim == 0 else out


def gradient_potential(rho):
    """Potential multiplying the radial-gradient combination."""
    rho = np.asarray(rho, dtype=float)
    s = rho * rho
    out = -2.0 * (3.0 * s - 35.0) / ((5.0 + 3.0 * s) * (5.0 - s))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CorrectionCoefficients:
    """Zeroth- and first-order Taylor data of the correction nonlinearity.

    slot1_weighted and slot3_weighted carry the radius factor that makes
    them smooth through the origin (the raw slot-1/slot-3 derivatives have
    a removable 1/rho).
    """

    order0: np.ndarray | float
    order0_dsigma: np.ndarray | float
    slot1_weighted: np.ndarray | float
    slot2: np.ndarray | float
    slot3_weighted: np.ndarray | float


def correction_coefficients(sigma, rho) -> CorrectionCoefficients:
    """Closed-form Taylor coefficients at (sigma, rho); broadcastable."""
    sigma = np.asarray(sigma, dtype=float)
    rho = np.asarray(rho, dtype=float)
    s = rho * rho
    q = 105.0 - 42.0 * s + s * s
    five_minus = 5.0 - s
    plus = 5.0 + 3.0 * s
    denom = 64.0 * five_minus + sigma**2 * plus**2

    g0 = 20.0 * q / (five_minus**1.5 * denom)
    g0_ds = -40.0 * plus**2 * q * sigma / (five_minus**1.5 * denom**2)
    p1 = 64.0 * (27.0 * s**4 - 2240.0 * s**3 + 15550.0 * s**2 - 25000.0 * s - 625.0)
    p2 = plus**2 * (23.0 * s**3 - 45.0 * s**2 + 2325.0 * s - 5375.0)
    g1w = -(p1 + sigma**2 * p2) / (five_minus**2 * denom**2)
    g2 = 2.0 * (35.0 - 3.0 * s) * plus / (five_minus * denom)
    g3w = 50.0 * (1.0 - s) * plus / (five_minus * denom)

    def _f(x):
        x = np.asarray(x)
        return float(x) if x.ndim == 0 else x

    return CorrectionCoefficients(_f(g0), _f(g0_ds), _f(g1w), _f(g2), _f(g3w))


def correction_nonlinearity(zeta1, zeta2, zeta3, sigma, rho):
    """Full correction nonlinearity around the profile (rho > 0).

    Shifts the arguments by the profile point (rho*U1, Lambda U1, rho*U2)
    and multiplies the source difference by the sigma-weight.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise model.ModelDomainError("rho must be positive; use the closed-form limit at 0")
    u1 = angle_over_radius(_P, rho)
    u2 = profile_angle_slope(_P, rho)
    x = rho * u1 + zeta1
    # Lambda U1 = rho * d/drho (U/rho) = U' - U/rho
    z2 = (u2 - u1) + zeta2
    z3 = rho * u2 + zeta3
    denom = np.asarray(sigma, dtype=float) ** 2 + 4.0 * np.sin(x) ** 2 / rho**2
    return model.source_difference(x, z2, z3, rho) / denom


def verify_coefficients_fd(n_samples: int = 200, tol: float = 1e-6, seed: int = 0):
    """Compare the closed forms against finite differences of the full
    nonlinearity at zeta = 0.

    Central differences with Richardson extrapolation; steps 1e-5 in the
    zeta slots and 1e-6 in sigma.  Returns a dict with the max relative
    error per coefficient and a pass flag.
    """
    rng = np.random.default_rng(seed)
    rho = rng.uniform(0.05, 0.95, n_samples)
    sigma = rng.uniform(0.0, 2.0, n_samples)
    c = correction_coefficients(sigma, rho)

    def rich(f, h):
        d1 = (f(h) - f(-h)) / (2.0 * h)
        d2 = (f(h / 2.0) - f(-h / 2.0)) / h
        return (4.0 * d2 - d1) / 3.0

    h = 1e-5
    base = correction_nonlinearity(0.0, 0.0, 0.0, sigma, rho)
    fd1 = rich(lambda e: correction_nonlinearity(e, 0.0, 0.0, sigma, rho), h)
    fd2 = rich(lambda e: correction_nonlinearity(0.0, e, 0.0, sigma, rho), h)
    fd3 = rich(lambda e: correction_nonlinearity(0.0, 0.0, e, sigma, rho), h)
    fds = rich(lambda e: correction_nonlinearity(0.0, 0.0, 0.0, sigma + e, rho), 1e-6)

    def rel(got, want):
        # floor the denominator at a fraction of the coefficient's scale so
        # samples where the value passes through 0 (e.g. the sigma-derivative
        # at sigma -> 0) do not turn roundoff into spurious relative error
        floor = 1e-3 * np.max(np.abs(want)) + 1e-30
        return np.max(np.abs(got - want) / np.maximum(np.abs(want), floor))

    errs = {
        "order0": rel(base, c.order0),
        "order0_dsigma": rel(fds, c.order0_dsigma),
        "slot1_weighted": rel(rho * fd1, c.slot1_weighted),
        "slot2": rel(fd2, c.slot2),
        "slot3_weighted": rel(rho * fd3, c.slot3_weighted),
    }
    max_err = max(errs.values())
    return {
        "max_rel_err": float(max_err),
        "per_coefficient": {k: float(v) for k, v in errs.items()},
        "n_samples": int(n_samples),
        "pass": bool(max_err <= tol),
    }
