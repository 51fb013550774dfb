"""Spectral stability of the self-similar profile.

The linearization of the similarity-coordinate flow about the profile is

    d/dtau (p1, p2) = L (p1, p2),
    L (p1, p2) = ( -rho p1' - p1 + p2,
                   p1'' + 6 p1'/rho - rho p2' - 4 p2
                   + V1 p1 + V2 rho (rho p2 - p1') )

on rho in [0, 1].  Regular perturbations are even in rho, so we collocate
in the squared variable s = rho^2 with Chebyshev points; every operator
above becomes polynomial in s (rho d/drho = 2s d/ds, the 7D radial
Laplacian becomes 4s d2/ds2 + 14 d/ds) and the origin needs no special
treatment.  The flow is outgoing at rho = 1 (characteristic speed rho), so
no boundary condition rows are imposed; spurious eigenvalues are removed
by keeping only eigenvalues that agree across two resolutions.

Eigenvalue 1 is exact: time-translation of the blowup time generates the
mode (rho U1' + U1, rho U2' + 2 U2) = (U2, rho U2' + 2 U2).
"""

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eig

from .coeffs import value_potential, gradient_potential
from .profile import profile_constants, angle_over_radius, profile_angle_slope

_P = profile_constants(5)


def chebyshev_nodes_matrix(n: int):
    """Chebyshev-Gauss-Lobatto points on [-1, 1] and the differentiation
    matrix, ordered from x = 1 down to x = -1."""
    if n == 0:
        return np.array([1.0]), np.zeros((1, 1))
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def clenshaw_curtis_weights(n: int) -> np.ndarray:
    """Quadrature weights on [-1, 1] for the Chebyshev-Gauss-Lobatto nodes."""
    if n == 0:
        return np.array([2.0])
    w = np.zeros(n + 1)
    v = np.ones(n - 1)
    for k in range(1, n // 2 + 1):
        factor = 2.0 if 2 * k < n else 1.0
        v -= factor * np.cos(2.0 * k * np.pi * np.arange(1, n) / n) / (
            4.0 * k * k - 1.0
        )
    w[1:-1] = 2.0 * v / n
    w[0] = w[-1] = 1.0 / (n * n - (n % 2 == 0))
    return w


@dataclass(frozen=True)
class Generator:
    """Collocated linearized generator on the squared radial variable."""

    n: int
    s: np.ndarray          # collocation nodes in s = rho^2, ascending
    rho: np.ndarray
    matrix: np.ndarray     # (2m, 2m) with m = n + 1
    weights: np.ndarray    # quadrature weights for the rho^6 dr norm

    def weighted_norm(self, p1: np.ndarray, p2: np.ndarray) -> float:
        q = self.weights
        return float(np.sqrt(np.sum(q * (np.abs(p1) ** 2 + np.abs(p2) ** 2))))


def assemble_generator(n: int, include_potential: bool = True) -> Generator:
    """Build the generator on n + 1 Chebyshev nodes in s = rho^2.

    With include_potential=False only the free transport part is kept
    (the potentials V1, V2 are dropped from the second block row)."""
    x, D = chebyshev_nodes_matrix(n)
    # map to s in [0, 1], ascending order
    idx = np.argsort(x)
    s = 0.5 * (1.0 + x[idx])
    Ds = 2.0 * D[np.ix_(idx, idx)]
    s[0] = 0.0
    rho = np.sqrt(s)
    m = n + 1

    v1 = value_potential(rho)
    v2 = gradient_potential(rho)
    S = np.diag(s)
    I = np.eye(m)

    adv = -2.0 * S @ Ds                       # -rho d/drho
    lap = 4.0 * S @ Ds @ Ds + 14.0 * Ds       # d2/drho2 + 6/rho d/drho

    A = np.zeros((2 * m, 2 * m))
    A[:m, :m] = adv - I
    A[:m, m:] = I
    A[m:, :m] = lap
    A[m:, m:] = adv - 4.0 * I
    if include_potential:
        A[m:, :m] += np.diag(v1) - 2.0 * np.diag(s * v2) @ Ds
        A[m:, m:] += np.diag(s * v2)

    # rho^6 dr = s^(5/2) ds / 2 quadrature weights (Clenshaw-Curtis in s)
    cc = 0.5 * clenshaw_curtis_weights(n)[idx]
    weights = 0.5 * cc * s ** 2.5
    return Generator(n=n, s=s, rho=rho, matrix=A, weights=weights)


def symmetry_mode(rho: np.ndarray):
    """Analytic eigenfunction at eigenvalue 1 from blowup-time translation."""
    u2 = profile_angle_slope(_P, rho)
    # U'' = U2 * rho * (1/(5 - rho^2) - 6/(5 + 3 rho^2))
    ddu = u2 * rho * (1.0 / (5.0 - rho**2) - 6.0 / (5.0 + 3.0 * rho**2))
    return u2, rho * ddu + 2.0 * u2


def symmetry_mode_residual(gen: Generator) -> float:
    """Weighted norm of (L - 1) applied to the analytic translation mode,
    relative to the mode's norm."""
    g1, g2 = symmetry_mode(gen.rho)
    v = np.concatenate([g1, g2])
    r = gen.matrix @ v - v
    m = gen.n + 1
    return gen.weighted_norm(r[:m], r[m:]) / gen.weighted_norm(g1, g2)


@dataclass(frozen=True)
class Spectrum:
    resolved: np.ndarray      # filtered eigenvalues, descending real part
    unstable_list: np.ndarray  # resolved eigenvalues with Re >= 0
    unstable: complex         # eigenvalue closest to 1
    stable_top: complex       # largest real part excluding the unstable one
    gap: float                # distance of the stable spectrum from the axis
    n_pair: tuple             # resolutions used for the two-grid filter


def compute_spectrum(n1: int = 128, n2: int = 192, match_tol: float = 1e-3,
                     include_potential: bool = True) -> Spectrum:
    """Two-grid resolved spectrum of the linearized generator.

    Eigenvalues of the n1 discretization are kept only if some eigenvalue
    of the n2 discretization lies within match_tol; this removes the
    spurious part of the collocation spectrum.  The reported gap is
    -max Re over resolved eigenvalues excluding the one nearest 1.
    """
    e1 = np.linalg.eigvals(assemble_generator(n1, include_potential).matrix)
    e2 = np.linalg.eigvals(assemble_generator(n2, include_potential).matrix)
    resolved = []
    for lam in e1:
        if np.min(np.abs(e2 - lam)) < match_tol:
            resolved.append(lam)
    if not resolved:
        raise RuntimeError("no resolved eigenvalues; increase match_tol")
    resolved = np.array(sorted(resolved, key=lambda z: -z.real))
    k = int(np.argmin(np.abs(resolved - 1.0)))
    unstable = complex(resolved[k])
    rest = np.delete(resolved, k)
    stable_top = complex(rest[int(np.argmax(rest.real))]) if rest.size else complex(
        np.nan
    )
    return Spectrum(
        resolved=resolved,
        unstable_list=resolved[resolved.real >= 0.0],
        unstable=unstable,
        stable_top=stable_top,
        gap=float(-stable_top.real),
        n_pair=(n1, n2),
    )


@dataclass(frozen=True)
class UnstableProjection:
    """Biorthogonal projection onto the unstable mode of the generator."""

    gen: Generator
    eigenvalue: complex
    right: np.ndarray   # right eigenvector, (2m,)
    left: np.ndarray    # left eigenvector, normalized so left @ right = 1

    def __call__(self, rho_grid: np.ndarray, p1: np.ndarray,
                 p2: np.ndarray) -> float:
        """Project a perturbation sampled on a uniform grid in rho.

        The fields are spline-interpolated to the collocation nodes; the
        returned coefficient is the component along the unstable mode in
        the discrete eigenbasis.
        """
        q1 = CubicSpline(rho_grid, p1)(self.gen.rho)
        q2 = CubicSpline(rho_grid, p2)(self.gen.rho)
        return float(np.real(self.left @ np.concatenate([q1, q2])))


def export_projection(n: int = 128) -> UnstableProjection:
    """Left/right eigenvector pair at the unstable eigenvalue."""
    gen = assemble_generator(n)
    vals, vl, vr = eig(gen.matrix, left=True, right=True)
    k = int(np.argmin(np.abs(vals - 1.0)))
    right = vr[:, k]
    left = vl[:, k].conj()
    m = gen.n + 1
    # the eigenvalue is real and simple, so the eigenvector can be taken
    # real; normalize to unit weighted norm, origin value of phi1 positive
    right = np.real(right * np.exp(-1j * np.angle(right[np.argmax(np.abs(right))])))
    right = right / gen.weighted_norm(right[:m], right[m:])
    if right[0] < 0.0:
        right = -right
    left = left / (left @ right)
    return UnstableProjection(
        gen=gen, eigenvalue=complex(vals[k]), right=right, left=left
    )
