"""Sample grids and grid wavefunctions.

Internal line coordinates live on uniform grids with trapezoid weights.
Orientation wavefunctions live on the axis-angle ball ||omega|| < pi
sampled by a product grid: midpoint shells in the rotation angle times a
Gauss-Legendre x uniform-azimuth direction set, weighted by the
normalized Haar density (1 - cos theta)/(4 pi^2 theta^2).  The midpoint
shells make the total Haar weight exactly 1 in floating point, and the
direction set is closed under u -> -u so parity integrals cancel
exactly.  Rotation-angle nodes never reach the chart boundary at pi;
states are expected to decay there (cyclic-boundary caveat), which is
monitored through ``boundary_mass``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import GridError

__all__ = ["LineGrid", "So3Grid", "GridWavefunction", "wrap_to_ball"]


@dataclass(frozen=True)
class LineGrid:
    """Uniform 1-d grid with trapezoid quadrature weights."""

    points: np.ndarray
    step: float
    weights: np.ndarray

    @classmethod
    def make(cls, x_min=-10.0, x_max=10.0, n=2048):
        if n < 64:
            raise GridError(f"line grid needs at least 64 points, got {n}")
        if not x_max > x_min:
            raise GridError("empty line grid extent")
        points = np.linspace(x_min, x_max, n)
        step = (x_max - x_min) / (n - 1)
        weights = np.full(n, step)
        weights[0] = weights[-1] = 0.5 * step
        return cls(points=points, step=step, weights=weights)

    @property
    def size(self):
        return self.points.size


def wrap_to_ball(points):
    """Map axis-angle points with norm > pi through the antipode.

    omega and omega (1 - 2 pi/||omega||) represent the same rotation;
    the image has norm 2 pi - ||omega||.  Used when finite-difference
    stencils poke outside the canonical ball.
    """
    points = np.asarray(points, dtype=float)
    norms = np.linalg.norm(points, axis=-1)
    outside = norms > np.pi
    if np.any(outside):
        points = points.copy()
        factor = 1.0 - 2.0 * np.pi / norms[outside]
        points[outside] = points[outside] * factor[..., None]
    return points


@dataclass(frozen=True)
class So3Grid:
    """Product quadrature grid on the axis-angle ball.

    nodes : (K, 3) rotation vectors, norms strictly inside pi.
    haar_weights : (K,) positive weights summing to 1.
    radial_step : spacing of the rotation-angle shells.
    """

    nodes: np.ndarray
    haar_weights: np.ndarray
    radial_step: float
    n_theta: int
    n_dirs: int
    boundary_mask: np.ndarray = field(repr=False, default=None)

    @classmethod
    def make(cls, n_theta=64, n_dirs=128):
        if n_theta < 16:
            raise GridError(f"need at least 16 rotation-angle shells, got {n_theta}")
        if n_dirs < 32:
            raise GridError(f"need at least 32 direction nodes, got {n_dirs}")
        h = np.pi / n_theta
        thetas = (np.arange(n_theta) + 0.5) * h
        # Haar radial density (1 - cos)/(4 pi^2 t^2) times shell area
        # 4 pi t^2 and uniform direction measure: shell weight
        # (1 - cos theta) h / pi sums to exactly 1 (cosine midpoints
        # telescope to zero over [0, pi]).
        w_rad = (1.0 - np.cos(thetas)) * h / np.pi

        n_polar = max(2, math.ceil(math.sqrt(n_dirs / 2.0)))
        n_azi = math.ceil(n_dirs / n_polar)
        n_azi += n_azi % 2  # even azimuth count keeps the set antipodal
        cos_b, w_b = np.polynomial.legendre.leggauss(n_polar)
        sin_b = np.sqrt(1.0 - cos_b**2)
        phi = 2.0 * np.pi * (np.arange(n_azi) + 0.5) / n_azi
        dirs = np.stack(
            [
                np.outer(sin_b, np.cos(phi)).ravel(),
                np.outer(sin_b, np.sin(phi)).ravel(),
                np.outer(cos_b, np.ones(n_azi)).ravel(),
            ],
            axis=1,
        )
        w_dir = np.outer(w_b / 2.0, np.full(n_azi, 1.0 / n_azi)).ravel()

        nodes = (thetas[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
        weights = (w_rad[:, None] * w_dir[None, :]).ravel()
        shell = np.repeat(thetas, dirs.shape[0])
        mask = shell > np.pi - 2.0 * h
        return cls(
            nodes=nodes,
            haar_weights=weights,
            radial_step=h,
            n_theta=n_theta,
            n_dirs=dirs.shape[0],
            boundary_mask=mask,
        )

    @property
    def size(self):
        return self.nodes.shape[0]


@dataclass(frozen=True)
class GridWavefunction:
    """Complex amplitudes on a grid, optionally backed by a profile.

    The profile is the generating callable (vectorized over (..., 3) for
    orientation grids, over (...,) for line grids) used to evaluate the
    state at off-node stencil points; operators that only need node
    values leave it None.
    """

    grid: object
    amplitudes: np.ndarray
    profile: object = None

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        expected = self.grid.size
        if amp.shape != (expected,):
            raise GridError(f"amplitudes must have shape ({expected},), got {amp.shape}")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def weights(self):
        return self.grid.weights if isinstance(self.grid, LineGrid) else self.grid.haar_weights

    def norm(self):
        return float(np.sqrt(np.sum(self.weights * np.abs(self.amplitudes) ** 2)))

    @classmethod
    def from_profile(cls, grid, profile):
        """Sample, normalize, and keep a consistently scaled profile."""
        if isinstance(grid, LineGrid):
            raw = np.asarray(profile(grid.points), dtype=complex)
            weights = grid.weights
        else:
            raw = np.asarray(profile(grid.nodes), dtype=complex)
            weights = grid.haar_weights
        scale = float(np.sqrt(np.sum(weights * np.abs(raw) ** 2)))
        if not scale > 0.0:
            raise GridError("profile vanishes on the grid")

        def scaled(points, _profile=profile, _scale=scale):
            return np.asarray(_profile(points), dtype=complex) / _scale

        return cls(grid=grid, amplitudes=raw / scale, profile=scaled)

    def boundary_mass(self):
        """Probability carried by the outermost two rotation-angle shells."""
        if isinstance(self.grid, LineGrid):
            return 0.0
        w = self.grid.haar_weights[self.grid.boundary_mask]
        a = self.amplitudes[self.grid.boundary_mask]
        return float(np.sum(w * np.abs(a) ** 2))
