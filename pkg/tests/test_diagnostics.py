import math

import numpy as np
import pytest

from skyrme_blowup.diagnostics import (
    DiagnosticsError,
    fit_exponential_decay,
    radial_norm,
    residual_check,
)
from skyrme_blowup.profile import (
    profile_constants,
    angle_over_radius,
    profile_angle,
)


@pytest.fixture(scope="module")
def rho():
    return np.linspace(0.0, 1.0, 1025)


def test_radial_norm_zero(rho):
    assert radial_norm(np.zeros_like(rho), rho) == 0.0


def test_radial_norm_constant(rho):
    got = radial_norm(np.ones_like(rho), rho, k=0)
    assert got == pytest.approx(1.0 / math.sqrt(7.0), abs=1e-8)


def test_radial_norm_quadratic(rho):
    got = radial_norm(rho**2, rho, k=1)
    assert got == pytest.approx(math.sqrt(1.0 / 11.0 + 4.0 / 9.0), abs=1e-8)


def test_radial_norm_homogeneous(rho):
    u = np.sin(3.0 * rho) + rho**2
    a = radial_norm(7.5 * u, rho, k=2)
    b = 7.5 * radial_norm(u, rho, k=2)
    assert a == pytest.approx(b, rel=1e-14)


def test_radial_norm_triangle(rho):
    rng = np.random.default_rng(3)
    for _ in range(5):
        u = rng.normal(size=rho.size)
        v = rng.normal(size=rho.size)
        assert radial_norm(u + v, rho) <= radial_norm(u, rho) + radial_norm(v, rho) + 1e-12


def test_radial_norm_order_error(rho):
    with pytest.raises(DiagnosticsError):
        radial_norm(rho, rho, k=6)


def test_fit_exponential_exact():
    tau = np.linspace(0.0, 5.0, 200)
    fit = fit_exponential_decay(tau, 3.0 * np.exp(-0.4 * tau))
    assert fit.exponent == pytest.approx(-0.4, abs=1e-12)
    assert fit.amplitude == pytest.approx(3.0, rel=1e-12)
    assert fit.residual < 1e-12


def test_fit_exponential_perturbed():
    tau = np.linspace(0.0, 5.0, 400)
    fit = fit_exponential_decay(tau, 3.0 * np.exp(-0.4 * tau) * (1.0 + 0.01 * np.sin(tau)))
    assert fit.exponent == pytest.approx(-0.4, abs=0.005)


def test_fit_exponential_constant():
    tau = np.linspace(0.0, 5.0, 50)
    fit = fit_exponential_decay(tau, np.full_like(tau, 2.0))
    assert abs(fit.exponent) < 1e-12


def test_fit_exponential_rejects_nonpositive():
    tau = np.linspace(0.0, 1.0, 10)
    with pytest.raises(DiagnosticsError):
        fit_exponential_decay(tau, np.linspace(-1.0, 1.0, 10))


def _exact_snapshots(r, t, dt, T=1.0):
    p = profile_constants(5)
    return [profile_angle(p, r / (T - s)) for s in (t - dt, t, t + dt)]


def test_residual_exact_self_similar():
    # exact blowup snapshot in the strong-field equation: pure discretization.
    # grid kept away from 0 so the cot term does not amplify FD error by 1/r
    residuals = []
    for n in (256, 512):
        r = np.linspace(0.1, 0.6, n + 1)
        h = r[1] - r[0]
        dt = 0.25 * h
        snaps = _exact_snapshots(r, 0.2, dt)
        residuals.append(residual_check("strong_field", r, snapshots=snaps, dt=dt))
    assert residuals[1] < residuals[0] / 3.0
    assert residuals[0] < 1e-2


def test_residual_zero_field():
    r = np.linspace(0.0, 1.0, 129)
    z = np.zeros_like(r)
    assert residual_check("strong_field", r[1:], snapshots=[z[1:]] * 3, dt=1e-3) == 0.0


def test_residual_similarity_stationary():
    # the profile is a stationary solution of the similarity system
    residuals = []
    for n in (256, 512):
        rho = np.linspace(0.0, 1.0, n + 1)
        z = np.zeros_like(rho)
        residuals.append(
            residual_check("similarity_stationary", rho, state=(z, z))
        )
    assert residuals[0] < 1e-3
    assert residuals[1] < residuals[0] / 3.0


def test_residual_unknown_equation():
    r = np.linspace(0.0, 1.0, 65)
    with pytest.raises(DiagnosticsError):
        residual_check("nope", r, snapshots=[r, r, r], dt=0.1)
