"""Closed-form self-similar blowup profile of the strong field model.

The blowup angle is U(rho) = arccos((a - b*rho^2)/(a + rho^2)) with
dimension-dependent constants a, b.  It rises monotonically from 0 at the
origin to pi at rho_star = sqrt(2a/(b-1)) > 1.  Everything the solvers need
is derived from it: the ratio U/rho, its slope, and the pair of similarity
variables (U/rho, U') that the first-order system perturbs around.
"""

from dataclasses import dataclass
import math

import numpy as np

# Below this radius the angle is evaluated from its odd Maclaurin series
# (through rho^5) instead of arccos, which loses accuracy to cancellation.
SERIES_THRESHOLD = 1e-2

_ENDPOINT_TOL = 1e-12


class ProfileDomainError(ValueError):
    """Radius outside the domain where the profile is defined."""


@dataclass(frozen=True)
class ProfileParams:
    """Dimension and derived profile constants."""

    d: int
    a: float
    b: float
    rho_star: float

    # odd-series coefficients of U: U = c1*rho + c3*rho^3 + c5*rho^5 + ...
    c1: float = 0.0
    c3: float = 0.0
    c5: float = 0.0


def profile_constants(d: int) -> ProfileParams:
    """Profile constants for spatial dimension d >= 5.

    Raises ProfileDomainError for d < 5, where b - 1 = 0 makes rho_star
    undefined.
    """
    if d < 5:
        raise ProfileDomainError(f"profile requires d >= 5, got d={d}")
    a = (2.0 * (d - 4) + math.sqrt(3.0 * (d - 4) * (d - 2))) / 3.0
    b = 2.0 * math.sqrt((d - 4) / (3.0 * (d - 2))) + 1.0
    if d == 5:
        # a = b = 5/3 exactly, so 2a/(b-1) = 5; avoids a one-ulp drift in
        # rho_star that would misclassify the endpoint.
        rho_star = math.sqrt(5.0)
    else:
        rho_star = math.sqrt(2.0 * a / (b - 1.0))

    # Maclaurin coefficients.  With s = rho^2 and w = cos U:
    #   1 - w = beta1*s + beta2*s^2 + beta3*s^3 + ...,  beta_k = (-1)^(k+1)(1+b)/a^k
    # and arccos(1 - x) = sqrt(2x) (1 + x/12 + 3x^2/160 + ...).
    beta1 = (1.0 + b) / a
    beta2 = -(1.0 + b) / a**2
    beta3 = (1.0 + b) / a**3
    c1 = math.sqrt(2.0 * beta1)
    coeff_a = beta2 / (2.0 * beta1) + beta1 / 12.0
    coeff_b = (
        beta3 / (2.0 * beta1)
        - beta2**2 / (8.0 * beta1**2)
        + beta2 / 24.0
        + beta2 / 12.0
        + 3.0 * beta1**2 / 160.0
    )
    return ProfileParams(
        d=d, a=a, b=b, rho_star=rho_star, c1=c1, c3=c1 * coeff_a, c5=c1 * coeff_b
    )


def _check_domain(p: ProfileParams, rho, upper: float):
    scalar = np.isscalar(rho) or np.ndim(rho) == 0
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < -_ENDPOINT_TOL) or np.any(rho > upper + _ENDPOINT_TOL):
        raise ProfileDomainError(
            f"rho must lie in [0, {upper}], got values in "
            f"[{rho.min()}, {rho.max()}]"
        )
    return np.clip(rho, 0.0, upper), scalar


def _ret(x, scalar):
    return float(x) if scalar else x


def profile_angle(p: ProfileParams, rho):
    """The blowup angle U(rho) on [0, rho_star], in radians."""
    rho, scalar = _check_domain(p, rho, p.rho_star)
    s = rho * rho
    w = (p.a - p.b * s) / (p.a + s)
    direct = np.arccos(np.clip(w, -1.0, 1.0))
    series = rho * (p.c1 + p.c3 * s + p.c5 * s * s)
    # Near rho_star arccos is ill-conditioned (w -> -1); use the factored
    # form 1 + w = (b-1)(rho_star - rho)(rho_star + rho)/(a + rho^2).
    one_plus_w = (p.b - 1.0) * (p.rho_star - rho) * (p.rho_star + rho) / (p.a + s)
    endpoint = math.pi - 2.0 * np.arcsin(np.sqrt(np.clip(0.5 * one_plus_w, 0.0, 1.0)))
    out = np.where(
        rho > 0.9 * p.rho_star,
        endpoint,
        np.where(rho < SERIES_THRESHOLD, series, direct),
    )
    return _ret(out, scalar)


def angle_over_radius(p: ProfileParams, rho):
    """U(rho)/rho with the removable singularity at 0 filled by U'(0)."""
    rho, scalar = _check_domain(p, rho, p.rho_star)
    s = rho * rho
    series = p.c1 + p.c3 * s + p.c5 * s * s
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = np.asarray(profile_angle(p, rho)) / np.where(rho > 0, rho, 1.0)
    return _ret(np.where(rho < SERIES_THRESHOLD, series, direct), scalar)


def profile_angle_slope(p: ProfileParams, rho):
    """U'(rho) = 2a sqrt(1+b) / ((a + rho^2) sqrt(2a - (b-1) rho^2)).

    Valid on [0, rho_star); the slope diverges at rho_star itself.
    """
    rho, scalar = _check_domain(p, rho, p.rho_star)
    s = rho * rho
    slope = (
        2.0
        * p.a
        * math.sqrt(1.0 + p.b)
        / ((p.a + s) * np.sqrt(np.maximum(2.0 * p.a - (p.b - 1.0) * s, 0.0)))
    )
    return _ret(slope, scalar)


def similarity_profile_pair(p: ProfileParams, rho):
    """The stationary pair (U/rho, U') on the similarity cone rho in [0, 1].

    The second component is (1 + rho d/drho) applied to U/rho, which
    collapses to U'(rho).
    """
    _check_domain(p, rho, 1.0)
    return angle_over_radius(p, rho), profile_angle_slope(p, rho)
