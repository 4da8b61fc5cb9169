"""Wavefunction factories for line and orientation grids.

Line states are gaussians (optionally with a momentum phase) and
harmonic-oscillator eigenstates.  Orientation states are wrapped
gaussians in the group geodesic distance d(omega, center), which makes
them smooth across the antipodal seam of the axis-angle chart, times an
optional plane-wave phase exp(i a . omega).  All factories normalize on
the given grid and keep the generating profile so finite-difference
operators can evaluate the state off the nodes.
"""

import numpy as np
from numpy.polynomial.hermite import hermval

from .grids import GridWavefunction, LineGrid

__all__ = [
    "gaussian_line_state",
    "oscillator_state",
    "so3_gaussian_state",
    "random_line_state",
    "random_so3_state",
    "geodesic_distance",
]


def _half_quats(omegas):
    # unit quaternions (w, xyz) for rotation vectors, vectorized
    omegas = np.asarray(omegas, dtype=float)
    theta = np.linalg.norm(omegas, axis=-1)
    half = 0.5 * theta
    w = np.cos(half)
    small = theta < 1e-12
    scale = np.empty_like(theta)
    scale[small] = 0.5
    scale[~small] = np.sin(half[~small]) / theta[~small]
    xyz = omegas * scale[..., None]
    return w, xyz


def geodesic_distance(omegas, center):
    """Rotation angle between R(omega) and R(center), vectorized."""
    w1, v1 = _half_quats(omegas)
    w2, v2 = _half_quats(np.asarray(center, dtype=float))
    dot = np.abs(w1 * w2 + np.sum(v1 * v2, axis=-1))
    return 2.0 * np.arccos(np.clip(dot, -1.0, 1.0))


def gaussian_line_state(grid, center=0.0, sigma=1.0, momentum=0.0, hbar=1.0):
    """Normalized gaussian exp(-(x-c)^2/4 sigma^2 + i k x / hbar).

    sigma is the position dispersion; momentum is the mean momentum.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    k = momentum / hbar

    def profile(x, c=float(center), s=float(sigma), k=float(k)):
        x = np.asarray(x, dtype=float)
        return np.exp(-((x - c) ** 2) / (4.0 * s * s) + 1j * k * x)

    return GridWavefunction.from_profile(grid, profile)


def oscillator_state(grid, n=0, mass=1.0, omega=1.0, hbar=1.0):
    """n-th harmonic oscillator eigenstate at the grid's resolution."""
    if n < 0:
        raise ValueError("quantum number must be nonnegative")
    alpha = np.sqrt(mass * omega / hbar)
    coeff = np.zeros(n + 1)
    coeff[n] = 1.0

    def profile(x, a=float(alpha), c=coeff):
        xi = a * np.asarray(x, dtype=float)
        return hermval(xi, c) * np.exp(-0.5 * xi * xi) + 0.0j

    return GridWavefunction.from_profile(grid, profile)


def so3_gaussian_state(grid, center=(0.0, 0.0, 0.0), sigma=0.3, wave=(0.0, 0.0, 0.0)):
    """Wrapped gaussian exp(-d^2/4 sigma^2 + i wave . omega) on orientations.

    d is the group geodesic distance to the center rotation, so the
    envelope is continuous across the antipodal seam; the phase factor
    is smooth only inside the ball and should stay small when boundary
    mass matters.
    """
    if sigma <= 0.0:
        raise ValueError("sigma must be positive")
    center = np.asarray(center, dtype=float)
    wave = np.asarray(wave, dtype=float)

    def profile(pts, c=center, s=float(sigma), a=wave):
        pts = np.asarray(pts, dtype=float)
        d = geodesic_distance(pts, c)
        return np.exp(-(d * d) / (4.0 * s * s) + 1j * (pts @ a))

    return GridWavefunction.from_profile(grid, profile)


def random_line_state(grid, rng, hbar=1.0):
    """Seeded two-gaussian mixture with random centers, widths, phases.

    Centers and widths scale with the grid span and stay narrow enough
    that the tails clear the momentum operator's edge-decay gate.
    """
    span = float(grid.points[-1] - grid.points[0])
    centers = rng.uniform(-0.08, 0.08, size=2) * span
    sigmas = rng.uniform(0.02, 0.045, size=2) * span
    ks = rng.uniform(-2.0, 2.0, size=2) / sigmas.max()
    amps = rng.uniform(0.5, 1.0, size=2) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=2))

    def profile(x, c=centers, s=sigmas, k=ks, a=amps, kk=float(1.0 / hbar)):
        x = np.asarray(x, dtype=float)[..., None]
        parts = a * np.exp(-((x - c) ** 2) / (4.0 * s * s) + 1j * kk * k * x)
        return parts.sum(axis=-1)

    return GridWavefunction.from_profile(grid, profile)


def random_so3_state(grid, rng, max_sigma=0.35):
    """Seeded mixture of two wrapped gaussians, interior by construction.

    Widths land in [0.2, max_sigma] and centers stay within
    min(0.7, pi - 6.8 sigma) of the identity so the boundary shells see
    only exponentially small mass.
    """
    sigmas = rng.uniform(0.2, max_sigma, size=2)
    amps = rng.uniform(0.5, 1.0, size=2) * np.exp(1j * rng.uniform(0, 2 * np.pi, size=2))
    centers = []
    for s in sigmas:
        reach = min(0.7, np.pi - 6.8 * s)
        u = rng.normal(size=3)
        u /= np.linalg.norm(u)
        centers.append(u * rng.uniform(0.0, reach))
    waves = rng.uniform(-1.0, 1.0, size=(2, 3))

    def profile(pts, c=centers, s=sigmas, a=amps, w=waves):
        pts = np.asarray(pts, dtype=float)
        total = np.zeros(pts.shape[:-1], dtype=complex)
        for ci, si, ai, wi in zip(c, s, a, w):
            d = geodesic_distance(pts, ci)
            total = total + ai * np.exp(-(d * d) / (4.0 * si * si) + 1j * (pts @ wi))
        return total

    return GridWavefunction.from_profile(grid, profile)
