"""Evolution in similarity coordinates and blowup-time shooting.

The physical field u(t, r) is rewritten through

    p1(tau, rho) = (T - t) u(t, (T - t) rho) - U1(rho),
    p2(tau, rho) = (T - t)^2 u_t(t, (T - t) rho) - U2(rho),
    t = T (1 - exp(-tau)),

so the exact self-similar collapse with blowup time T becomes the fixed
point p = 0.  The linearization has a single unstable direction (the
blowup-time translation mode at eigenvalue 1), so tuning the trial T is a
one-parameter shooting problem: bisect until the unstable component of
the evolved perturbation changes sign.
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .coeffs import value_potential, gradient_potential
from .diagnostics import radial_norm
from .model import perturbation_guard, strong_field_source
from .physical import FieldState, RadialGrid, SolverError
from .profile import profile_constants, angle_over_radius, profile_angle_slope
from .spectral import UnstableProjection, export_projection

_P = profile_constants(5)


class BracketError(SolverError):
    """The trial interval does not straddle the blowup time."""


class AmplitudeError(SolverError):
    """The perturbation is too large to stay in the perturbative regime."""


@dataclass
class SimilarityState:
    tau: float
    phi1: np.ndarray
    phi2: np.ndarray


@dataclass
class SimilarityTrajectory:
    states: list[SimilarityState]
    taus: np.ndarray
    origin_values: np.ndarray     # phi1 at rho = 0 for each accepted step
    norms: np.ndarray             # surrogate Sobolev norm at each stored state
    divergent: bool = False
    reason: str = ""


def profile_tables(rho: np.ndarray):
    """Profile arrays consumed by the similarity kernel."""
    u1 = angle_over_radius(_P, rho)
    u2 = profile_angle_slope(_P, rho)
    du1 = np.zeros_like(rho)
    pos = rho > 0.0
    du1[pos] = (u2[pos] - u1[pos]) / rho[pos]
    fsf0 = np.zeros_like(rho)
    fsf0[pos] = strong_field_source(
        rho[pos] * u1[pos], rho[pos] * du1[pos], rho[pos] * u2[pos], rho[pos]
    )
    return u1, du1, u2, fsf0, value_potential(rho), gradient_potential(rho)


BOUNDARY_TRIM = 8


def similarity_norm(phi1: np.ndarray, phi2: np.ndarray, rho: np.ndarray,
                    order: int = 2) -> float:
    """Discrete weighted Sobolev surrogate of the perturbation pair.

    The last few cells are excluded: the outflow closure at rho = 1
    supports marginal grid-scale modes whose higher derivatives would
    otherwise dominate the norm without representing solution content.
    """
    m = rho.size - BOUNDARY_TRIM
    return float(np.sqrt(radial_norm(phi1[:m], rho[:m], k=order) ** 2
                         + radial_norm(phi2[:m], rho[:m], k=order) ** 2))


def similarity_from_physical(r: np.ndarray, u: np.ndarray, ut: np.ndarray,
                             t: float, T: float, rho: np.ndarray):
    """Transform a physical semilinear snapshot to the perturbation pair.

    The snapshot must cover radii up to (T - t) * max(rho)."""
    mu = T - t
    if mu <= 0.0:
        raise SolverError("trial blowup time must exceed the snapshot time")
    if mu * rho[-1] > r[-1] + 1e-12:
        raise SolverError("snapshot does not cover the similarity domain")
    su = CubicSpline(r, u)
    sut = CubicSpline(r, ut)
    phi1 = mu * su(mu * rho) - angle_over_radius(_P, rho)
    phi2 = mu**2 * sut(mu * rho) - profile_angle_slope(_P, rho)
    return phi1, phi2


def initial_data(rho: np.ndarray, T: float, r: np.ndarray,
                 v1: np.ndarray, v2: np.ndarray):
    """Perturbation pair at tau = 0 from physical perturbation data.

    (v1, v2) perturb the exact self-similar data (profile and its slope)
    on the radial grid r, which must reach at least T * max(rho):

        p_i(0, rho) = T^i (v_i + U_i)(T rho) - U_i(rho).
    """
    if T * rho[-1] > r[-1] + 1e-12:
        raise SolverError("perturbation data does not cover radius T")
    u = angle_over_radius(_P, r) + v1
    ut = profile_angle_slope(_P, r) + v2
    return similarity_from_physical(r, u, ut, 0.0, T, rho)


def synthesize_perturbation(rho: np.ndarray, seed: int, amplitude: float):
    """Random smooth even perturbation pair, sup-norm about `amplitude`."""
    rng = np.random.default_rng(seed)

    def one():
        coeff = rng.standard_normal(4)
        f = np.zeros_like(rho)
        for k, c in enumerate(coeff):
            f += c * np.cos((2 * k + 1) * 0.5 * np.pi * rho**2)
        return amplitude * f / max(np.max(np.abs(f)), 1e-300)

    return one(), one()


def evolve_similarity(phi1: np.ndarray, phi2: np.ndarray, grid: RadialGrid,
                      tau_end: float, sigma0: float = 0.0, tau0: float = 0.0,
                      cfl: float = 0.4, stride: int = 16,
                      guard: float | None = None,
                      norm_order: int = 2) -> SimilarityTrajectory:
    """RK4 evolution of the perturbation pair up to tau_end.

    sigma0 is the scale factor lambda * T at tau = tau0; it decays like
    exp(-tau) along the flow.  The run stops early (divergent=True) when
    the field leaves the perturbative regime set by `guard` (default: half
    the sup-norm distance from the profile to the equilibrium pi) or turns
    non-finite; the last finite state is always stored.
    """
    rho = grid.nodes
    h = grid.spacing
    if abs(rho[-1] - 1.0) > 1e-12:
        raise SolverError("similarity grid must end at rho = 1")
    if guard is None:
        guard = perturbation_guard()
    u1, du1, u2, fsf0, v1, v2 = profile_tables(rho)

    n_steps = max(1, int(np.ceil((tau_end - tau0) / (0.5 * cfl * h))))
    dtau = (tau_end - tau0) / n_steps

    y1 = np.array(phi1, dtype=float)
    y2 = np.array(phi2, dtype=float)
    states = [SimilarityState(tau0, y1.copy(), y2.copy())]
    taus = [tau0]
    origin = [y1[0]]
    norms = [similarity_norm(y1, y2, rho, norm_order)]
    divergent = False
    reason = ""

    def rhs(a, b, tau):
        sigma = sigma0 * np.exp(-(tau - tau0))
        return kernels.similarity(a, b, rho, h, sigma, u1, du1, u2,
                                  fsf0, v1, v2)

    def store(tau):
        states.append(SimilarityState(tau, y1.copy(), y2.copy()))
        norms.append(similarity_norm(y1, y2, rho, norm_order))

    if np.max(np.abs(y1)) > guard:
        return SimilarityTrajectory(
            states=states, taus=np.array(taus),
            origin_values=np.array(origin), norms=np.array(norms),
            divergent=True, reason="initial data outside the guard",
        )

    for k in range(n_steps):
        tk = tau0 + k * dtau
        p1, p2 = y1, y2
        k1a, k1b = rhs(y1, y2, tk)
        k2a, k2b = rhs(y1 + 0.5 * dtau * k1a, y2 + 0.5 * dtau * k1b,
                       tk + 0.5 * dtau)
        k3a, k3b = rhs(y1 + 0.5 * dtau * k2a, y2 + 0.5 * dtau * k2b,
                       tk + 0.5 * dtau)
        k4a, k4b = rhs(y1 + dtau * k3a, y2 + dtau * k3b, tk + dtau)
        y1 = y1 + dtau / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        y2 = y2 + dtau / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        tau = tau0 + (k + 1) * dtau
        if not (np.all(np.isfinite(y1)) and np.all(np.isfinite(y2))):
            y1, y2 = p1, p2
            if states[-1].tau < tk:
                store(tk)
            divergent, reason = True, "non-finite perturbation"
            break
        taus.append(tau)
        origin.append(y1[0])
        if np.max(np.abs(y1)) > guard:
            store(tau)
            divergent, reason = True, "left the perturbative regime"
            break
        if (k + 1) % stride == 0 or k == n_steps - 1:
            store(tau)
    return SimilarityTrajectory(
        states=states,
        taus=np.array(taus),
        origin_values=np.array(origin),
        norms=np.array(norms),
        divergent=divergent,
        reason=reason,
    )


def projection_history(traj: SimilarityTrajectory, grid: RadialGrid,
                       proj: UnstableProjection):
    """Unstable-mode coefficient at each stored state."""
    rho = grid.nodes
    taus = np.array([s.tau for s in traj.states])
    coeffs = np.array([proj(rho, s.phi1, s.phi2) for s in traj.states])
    return taus, coeffs


@dataclass(frozen=True)
class ShootingResult:
    T_star: float
    bracket: tuple[float, float]
    iterations: int
    lam: float
    converged: bool
    projection_history: tuple[np.ndarray, np.ndarray]  # (tau, coefficient)


def _tuned_run(T, lam, r, v1, v2, grid, tau_horizon, cfl, stride=16):
    phi1, phi2 = initial_data(grid.nodes, T, r, v1, v2)
    return evolve_similarity(phi1, phi2, grid, tau_horizon,
                             sigma0=lam * T, cfl=cfl, stride=stride)


def shoot_blowup_time(v1: np.ndarray, v2: np.ndarray, r: np.ndarray,
                      lam: float, T_lo: float, T_hi: float,
                      grid: RadialGrid | None = None,
                      tau_horizon: float = 6.0, tol: float = 1e-6,
                      cfl: float = 0.4,
                      proj: UnstableProjection | None = None) -> ShootingResult:
    """Bisect the trial blowup time for perturbed self-similar data.

    (v1, v2) is the physical perturbation on the radial grid r (covering
    radius >= T_hi).  The shooting functional is the unstable-mode
    coefficient of the evolved perturbation at tau_horizon (or at the
    moment the run leaves the guard, by which point the sign is settled).
    """
    if grid is None:
        grid = RadialGrid(1.0, 256)
    if proj is None:
        proj = export_projection(96)

    def endpoint(T):
        traj = _tuned_run(T, lam, r, v1, v2, grid, tau_horizon, cfl,
                          stride=10**9)
        s = traj.states[-1]
        return proj(grid.nodes, s.phi1, s.phi2), traj

    f_lo, t_lo = endpoint(T_lo)
    f_hi, t_hi = endpoint(T_hi)
    if (t_lo.reason == "initial data outside the guard"
            and t_hi.reason == t_lo.reason):
        raise AmplitudeError("perturbation too large at both endpoints")
    if f_lo * f_hi > 0.0:
        raise BracketError(
            f"bracket [{T_lo}, {T_hi}] does not straddle the blowup time "
            f"(signs {np.sign(f_lo)}, {np.sign(f_hi)})"
        )
    iters = 0
    while T_hi - T_lo > tol:
        T_mid = 0.5 * (T_lo + T_hi)
        f_mid, _ = endpoint(T_mid)
        if f_mid == 0.0:
            T_lo = T_hi = T_mid
            break
        if f_lo * f_mid < 0.0:
            T_hi, f_hi = T_mid, f_mid
        else:
            T_lo, f_lo = T_mid, f_mid
        iters += 1
        if iters > 200:
            raise SolverError("bisection failed to converge")
    T_star = 0.5 * (T_lo + T_hi)
    tuned = _tuned_run(T_star, lam, r, v1, v2, grid, tau_horizon, cfl)
    return ShootingResult(
        T_star=T_star,
        bracket=(T_lo, T_hi),
        iterations=iters,
        lam=lam,
        converged=T_hi - T_lo <= tol,
        projection_history=projection_history(tuned, grid, proj),
    )
