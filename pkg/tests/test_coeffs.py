import math

import numpy as np
import pytest

from skyrme_blowup.coeffs import (
    correction_coefficients,
    correction_nonlinearity,
    gradient_potential,
    value_potential,
    verify_coefficients_fd,
)
from skyrme_blowup.model import strong_field_source
from skyrme_blowup.profile import (
    profile_constants,
    angle_over_radius,
    profile_angle_slope,
)


def test_value_potential_spots():
    assert value_potential(0.0) == pytest.approx(17.0, abs=1e-12)
    assert value_potential(1.0) == pytest.approx(5.0, abs=1e-12)


def test_gradient_potential_spots():
    assert gradient_potential(0.0) == pytest.approx(2.8, abs=1e-12)
    assert gradient_potential(1.0) == pytest.approx(2.0, abs=1e-12)


def _profile_point(rho):
    p = profile_constants(5)
    u1 = angle_over_radius(p, rho)
    u2 = profile_angle_slope(p, rho)
    return rho * u1, u2 - u1, rho * u2


def test_value_potential_fd_oracle():
    # V1 = rho * d f_sf / d(slot 1) at the profile point
    rho, h = 0.5, 1e-6
    z1, z2, z3 = _profile_point(rho)
    fd = (
        strong_field_source(z1 + h, z2, z3, rho)
        - strong_field_source(z1 - h, z2, z3, rho)
    ) / (2.0 * h)
    assert rho * fd == pytest.approx(value_potential(rho), rel=1e-6)


def test_gradient_potential_fd_oracle():
    # d f_sf / d(slot 2) = -V2 and d f_sf / d(slot 3) = rho V2 - 2/rho
    rho, h = 0.3, 1e-6
    z1, z2, z3 = _profile_point(rho)
    fd2 = (
        strong_field_source(z1, z2 + h, z3, rho)
        - strong_field_source(z1, z2 - h, z3, rho)
    ) / (2.0 * h)
    fd3 = (
        strong_field_source(z1, z2, z3 + h, rho)
        - strong_field_source(z1, z2, z3 - h, rho)
    ) / (2.0 * h)
    v2 = gradient_potential(rho)
    assert fd2 == pytest.approx(-v2, rel=1e-6)
    assert fd3 == pytest.approx(rho * v2 - 2.0 / rho, rel=1e-6)


def test_potentials_even():
    # smooth and even in rho: first and third FD derivatives at 0 vanish
    h = 1e-3
    for f in (value_potential, gradient_potential):
        d1 = (f(h) - f(-h)) / (2.0 * h)
        d3 = (f(2 * h) - 2 * f(h) + 2 * f(-h) - f(-2 * h)) / (2.0 * h**3)
        assert abs(d1) < 1e-10
        assert abs(d3) < 1e-4


def test_coefficient_spots():
    c = correction_coefficients(0.0, 0.0)
    assert c.order0 == pytest.approx(21.0 / (16.0 * math.sqrt(5.0)), abs=1e-10)
    assert c.order0_dsigma == 0.0
    assert c.slot1_weighted == pytest.approx(1.0 / 64.0, abs=1e-10)
    assert c.slot2 == pytest.approx(7.0 / 32.0, abs=1e-10)
    assert c.slot3_weighted == pytest.approx(5.0 / 32.0, abs=1e-10)
    assert correction_coefficients(0.0, 1.0).order0 == pytest.approx(0.625, abs=1e-10)


def test_order0_decreasing_in_sigma():
    sig = np.linspace(0.0, 10.0, 50)
    for rho in [0.0, 0.5, 0.9]:
        g0 = correction_coefficients(sig, rho).order0
        assert np.all(np.diff(g0) < 0.0)
        assert g0[-1] < 0.2 * g0[0]


def test_order0_dsigma_fd():
    sig = np.linspace(0.5, 3.0, 20)
    h = 1e-5
    for rho in [0.2, 0.8]:
        c = correction_coefficients(sig, rho)
        fd = (
            correction_coefficients(sig + h, rho).order0
            - correction_coefficients(sig - h, rho).order0
        ) / (2.0 * h)
        assert np.max(np.abs(fd - c.order0_dsigma) / np.abs(c.order0_dsigma)) < 1e-8


def test_sup_stabilizes_under_sigma_refinement():
    # the max over a log-spaced sigma grid up to 1e3 stabilizes to 3 digits
    rho = np.linspace(0.0, 1.0, 201)
    sups = []
    for n in (200, 400):
        sig = np.concatenate([[0.0], np.geomspace(1e-3, 1e3, n)])
        c = correction_coefficients(sig[:, None], rho[None, :])
        sups.append(
            [
                np.max(np.abs(getattr(c, f)))
                for f in (
                    "order0",
                    "order0_dsigma",
                    "slot1_weighted",
                    "slot2",
                    "slot3_weighted",
                )
            ]
        )
    a, b = np.array(sups)
    assert np.all(np.isfinite(a)) and np.all(np.isfinite(b))
    assert np.max(np.abs(a - b) / b) < 1e-3


def test_full_nonlinearity_matches_order0_at_zero():
    rho = np.linspace(0.1, 0.9, 30)
    sig = 0.7
    got = correction_nonlinearity(0.0, 0.0, 0.0, sig, rho)
    want = correction_coefficients(sig, rho).order0
    assert np.max(np.abs(got - want)) < 1e-12


def test_fd_verification_passes():
    rep = verify_coefficients_fd(n_samples=200, tol=1e-6)
    assert rep["pass"], rep
    assert rep["max_rel_err"] <= 1e-6
