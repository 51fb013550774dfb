"""Right-hand-side ingredients of the physical equations, plus energies.

The wave-maps and strong-field source terms both suffer catastrophic
cancellation for small first argument, so each carries a Maclaurin branch
below SERIES_THRESHOLD.  The scale weight combines them into the
lambda-correction of the semilinear equation.
"""

from dataclasses import dataclass
import enum
import math

import numpy as np
from scipy.integrate import simpson

from .profile import ProfileParams, profile_constants, profile_angle

SERIES_THRESHOLD = 1e-2

_PI_TOL = 1e-12


class ModelDomainError(ValueError):
    """Argument outside the domain of a source term."""


class SingularInputError(ModelDomainError):
    """First argument at a non-removable singularity (nonzero multiple of pi)."""


class Model(enum.Enum):
    FULL = "full"
    STRONG_FIELD = "strong_field"
    SEMILINEAR = "semilinear"


@dataclass(frozen=True)
class ModelParams:
    """Couplings and scale for one of the three model variants."""

    alpha: float = 1.0
    beta: float = 1.0
    lam: float = 0.0
    model: Model = Model.FULL

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ModelDomainError("couplings must be nonnegative")
        if self.alpha == 0 and self.beta == 0:
            raise ModelDomainError("alpha and beta cannot both vanish")
        if self.model is Model.STRONG_FIELD and self.alpha != 0:
            object.__setattr__(self, "alpha", 0.0)
        if self.model is Model.SEMILINEAR and self.lam < 0:
            raise ModelDomainError("lambda must be nonnegative")


def _cot(x):
    return np.cos(x) / np.sin(x)


def wave_maps_source(x, r):
    """(4x - 2 sin 2x)/r^3, series-evaluated for small x."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ModelDomainError("radius must be positive")
    x = np.asarray(x, dtype=float)
    x2 = x * x
    # 4x - 2 sin 2x = (8/3)x^3 - (8/15)x^5 + (16/315)x^7 + O(x^9)
    series = x * x2 * (8.0 / 3.0 + x2 * (-8.0 / 15.0 + x2 * (16.0 / 315.0)))
    direct = 4.0 * x - 2.0 * np.sin(2.0 * x)
    num = np.where(np.abs(x) < SERIES_THRESHOLD, series, direct)
    out = num / r**3
    return float(out) if out.ndim == 0 else out


def _sf_pieces(z1):
    """cot(z1), 1 - z1*cot(z1), and (3/2)sin(2 z1) - 2 z1 - z1^2 cot(z1).

    The latter two cancel catastrophically near 0 and are series-evaluated
    there.  cot itself is returned raw (it may legitimately be huge).
    """
    z1 = np.asarray(z1, dtype=float)
    small = np.abs(z1) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, z1)  # keep sin away from 0 in the off-branch
    cot = np.cos(safe) / np.sin(safe)
    with np.errstate(divide="ignore", invalid="ignore"):
        cot_raw = np.cos(z1) / np.sin(z1)
    cot = np.where(small, cot_raw, cot)

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


def strong_field_source(z1, z2, z3, r):
    """The strong field nonlinearity f(z1, z2, z3, r).

    z1, z2, z3 are r*u, r*du/dr, r*du/dt.  Singular when z1 hits a nonzero
    multiple of pi; the removable singularity at z1 = 0 is taken in the
    limit sense (requires z3^2 = z2^2 there, e.g. all arguments zero).
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ModelDomainError("radius must be positive")
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    z3 = np.asarray(z3, dtype=float)

    k = np.round(z1 / math.pi)
    if np.any((k != 0) & (np.abs(z1 - k * math.pi) < _PI_TOL)):
        raise SingularInputError("z1 at a nonzero multiple of pi")

    cot, one_minus, cubic = _sf_pieces(z1)
    quad = z3 * z3 - z2 * z2
    at_zero = np.abs(z1) < _PI_TOL
    if np.any(at_zero & (np.abs(quad) > _PI_TOL)):
        raise SingularInputError("z1 = 0 with z3^2 != z2^2 is singular")
    first = np.where(at_zero, 0.0, -cot * quad / r)
    out = first - 2.0 * one_minus * z2 / r**2 - cubic / r**3
    return float(out) if out.ndim == 0 else out


def source_difference(z1, z2, z3, r):
    """Wave-maps minus strong-field source; the lambda-correction numerator."""
    return wave_maps_source(z1, r) - strong_field_source(z1, z2, z3, r)


def scale_weight(z1, r, lam):
    """(lam^2 + 4 sin^2(z1)/r^2)^(-1), the scale-breaking weight."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ModelDomainError("radius must be positive")
    z1 = np.asarray(z1, dtype=float)
    sin2 = np.sin(z1) ** 2
    denom = lam * lam + 4.0 * sin2 / (r * r)
    if np.any(denom <= 0) or np.any(denom < 1e-300):
        raise SingularInputError("vanishing weight denominator (lam = 0, sin z1 = 0)")
    out = 1.0 / denom
    return float(out) if out.ndim == 0 else out


def perturbation_guard(p: ProfileParams | None = None) -> float:
    """Half the gap between pi and sup of rho*(U/rho) over [0, 2].

    Perturbations of the first similarity variable must stay within this
    bound for the correction nonlinearity to be defined.
    """
    if p is None:
        p = profile_constants(5)
    rho = np.linspace(0.0, 2.0, 4001)
    sup = float(np.max(profile_angle(p, rho)))
    return 0.5 * (math.pi - sup)


def energies(r, psi, psi_t, params: ModelParams, d: int = 5):
    """Quadrature of the conserved energy pieces (E2, E4, E = alpha E2 + beta E4).

    r is a uniform radial grid starting at 0; psi must vanish at r = 0.
    Ratios sin^2(psi)/r^2 are paired with the r^(d-1) weight so every
    integrand extends continuously to the origin for d >= 5.
    """
    r = np.asarray(r, dtype=float)
    psi = np.asarray(psi, dtype=float)
    psi_t = np.asarray(psi_t, dtype=float)
    if not (np.all(np.isfinite(psi)) and np.all(np.isfinite(psi_t))):
        raise ModelDomainError("non-finite field values")
    psi_r = np.gradient(psi, r, edge_order=2)
    s2 = np.sin(psi) ** 2
    kin = psi_t**2 + psi_r**2
    with np.errstate(divide="ignore", invalid="ignore"):
        s2_over_r2 = np.where(r > 0, s2 / np.where(r > 0, r, 1.0) ** 2, psi_r**2)
    w2 = r ** (d - 1)
    w4 = r ** (d - 3)
    e2 = 0.5 * simpson((kin + (d - 1) * s2_over_r2) * w2, x=r)
    e4 = 0.5 * (d - 1) * simpson(s2 * (kin + 0.5 * (d - 2) * s2_over_r2) * w4, x=r)
    return e2, e4, params.alpha * e2 + params.beta * e4
