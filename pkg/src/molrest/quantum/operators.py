"""Grid realizations of position, momentum, and angular-momentum operators.

Line momentum is -i hbar times a central finite difference on the node
amplitudes (states must decay at the grid ends).  Orientation-space
operators differentiate the state's generating profile along chart
directions, wrapping stencil points that poke outside the axis-angle
ball through the antipode.  The chart derivative D_j = -i hbar d/dw^j
realizes n_(j)(w) . L; body components follow from the dual frame,
L_k = sum_j m[j, k] D_j.

The commutator residual helpers evaluate the canonical relations
pointwise, report the worst interior node relative to hbar * max|psi|,
and exclude a configurable number of boundary shells (the chart seam is
where the finite-difference wrap stops being exact for the coordinate
functions themselves).
"""

import numpy as np

from ..errors import BoundaryMassError, GridError, SingularInertiaError
from ..lie_so3 import log_density_gradient, skew
from .grids import GridWavefunction, LineGrid, So3Grid, wrap_to_ball

__all__ = [
    "BOUNDARY_MASS_TOL",
    "position_op",
    "momentum_op",
    "angmom_op",
    "body_angmom_op",
    "frame_fields",
    "line_commutator_residual",
    "chart_commutator_residuals",
    "body_commutator_residuals",
    "angvel_commutator_check",
]

BOUNDARY_MASS_TOL = 1e-8

# offsets and weights of the central first-derivative stencils
_STENCILS = {
    2: ((-1, 1), (-0.5, 0.5)),
    4: ((-2, -1, 1, 2), (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0)),
}


def _coordinate(grid, component):
    if isinstance(grid, LineGrid):
        if component not in (0, None):
            raise GridError("line grids have a single coordinate (component 0)")
        return grid.points
    if component is None or not 0 <= int(component) <= 2:
        raise GridError("orientation coordinate component must be 0, 1, or 2")
    return grid.nodes[:, int(component)]


def position_op(psi, component=0):
    """Multiply by the coordinate sample (Q, q, x, or omega^k).

    Keeps a composed profile when the input has one, so the result can
    still be differentiated off the nodes.
    """
    coord = _coordinate(psi.grid, component)
    profile = None
    if psi.profile is not None:
        if isinstance(psi.grid, LineGrid):

            def profile(points, _p=psi.profile):
                points = np.asarray(points, dtype=float)
                return points * _p(points)

        else:

            def profile(points, _p=psi.profile, _k=int(component)):
                points = np.asarray(points, dtype=float)
                return points[..., _k] * _p(points)

    return GridWavefunction(grid=psi.grid, amplitudes=coord * psi.amplitudes, profile=profile)


def _line_derivative(amplitudes, step, order):
    if order not in _STENCILS:
        raise GridError(f"unsupported stencil order {order}")
    pad = np.pad(amplitudes, (2, 2))
    if order == 2:
        return (pad[3:-1] - pad[1:-3]) / (2.0 * step)
    return (pad[:-4] - 8.0 * pad[1:-3] + 8.0 * pad[3:-1] - pad[4:]) / (12.0 * step)


def momentum_op(psi, hbar=1.0, order=4):
    """-i hbar d/dx by central differences on a LineGrid.

    The stencil assumes the state vanishes beyond the grid; amplitudes
    at the two outermost nodes on each end must be below 1e-8 of the
    peak or the zero padding would corrupt the derivative.
    """
    if not isinstance(psi.grid, LineGrid):
        raise GridError("momentum_op needs a LineGrid state")
    amp = psi.amplitudes
    peak = float(np.abs(amp).max())
    edge = float(max(np.abs(amp[:2]).max(), np.abs(amp[-2:]).max()))
    if peak == 0.0 or edge > 1e-8 * peak:
        raise BoundaryMassError(
            f"insufficient decay at grid ends: edge/peak = {edge / peak if peak else np.inf:.3e}"
        )
    deriv = _line_derivative(amp, psi.grid.step, order)
    return GridWavefunction(grid=psi.grid, amplitudes=-1j * hbar * deriv, profile=None)


def _chart_derivative(psi, direction, step, order):
    """d(psi)/dw^j at the nodes, evaluated through the profile."""
    if not isinstance(psi.grid, So3Grid):
        raise GridError("chart derivatives need an So3Grid state")
    if psi.profile is None:
        raise GridError("state lacks a generating profile for off-node evaluation")
    if order not in _STENCILS:
        raise GridError(f"unsupported stencil order {order}")
    offsets, coeffs = _STENCILS[order]
    unit = np.zeros(3)
    unit[int(direction)] = 1.0
    nodes = psi.grid.nodes
    acc = np.zeros(nodes.shape[0], dtype=complex)
    for off, cf in zip(offsets, coeffs):
        pts = wrap_to_ball(nodes + (off * step) * unit)
        acc = acc + cf * np.asarray(psi.profile(pts), dtype=complex)
    return acc / step


def _default_step(grid):
    # stay below the shell spacing but cap so 4th-order truncation of
    # sigma >= 0.1 states lands under the commutator tolerances
    return min(grid.radial_step, 0.02)


def _gate_boundary(psi, enforce):
    mass = psi.boundary_mass()
    if enforce and mass >= BOUNDARY_MASS_TOL:
        raise BoundaryMassError(
            f"orientation state carries boundary mass {mass:.3e} >= {BOUNDARY_MASS_TOL:g}; "
            "chart derivatives are unreliable near the seam"
        )
    return mass


def angmom_op(psi, body_index, hbar=1.0, step=None, order=4, symmetric=False,
              enforce_boundary=True):
    """(n_(j)(w) . L) psi = -i hbar d(psi)/dw^j on an So3Grid.

    symmetric=True adds the Haar drift -i hbar/2 (d_j ln rho) psi, which
    makes the operator hermitian under the weighted quadrature; the
    drift cancels in commutators with coordinate functions.
    """
    _gate_boundary(psi, enforce_boundary)
    if step is None:
        step = _default_step(psi.grid)
    j = int(body_index)
    deriv = _chart_derivative(psi, j, step, order)
    if symmetric:
        drift = log_density_gradient(psi.grid.nodes)[:, j]
        deriv = deriv + 0.5 * drift * psi.amplitudes
    return GridWavefunction(grid=psi.grid, amplitudes=-1j * hbar * deriv, profile=None)


def frame_fields(nodes):
    """n- and m-matrices at a stack of chart points, shape (..., 3, 3).

    Vectorized version of the single-point frame: n = 1 - c2 K + c3 K^2
    and its inverse m = 1 + K/2 + d K^2 with K = skew(w).  Series
    branches keep the coefficient ratios finite near the origin.
    """
    nodes = np.asarray(nodes, dtype=float)
    theta = np.linalg.norm(nodes, axis=-1)
    t2 = theta * theta
    small = theta < 1e-4
    safe = np.where(small, 1.0, theta)
    safe2 = safe * safe
    with np.errstate(invalid="ignore", divide="ignore"):
        c2 = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
                      (1.0 - np.cos(safe)) / safe2)
        c3 = np.where(small, 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
                      (safe - np.sin(safe)) / (safe2 * safe))
        d = np.where(small, 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0,
                     1.0 / safe2 - (1.0 + np.cos(safe)) / (2.0 * safe * np.sin(safe)))
    k = skew(nodes)
    k2 = k @ k
    eye = np.broadcast_to(np.eye(3), k.shape)
    n = eye - c2[..., None, None] * k + c3[..., None, None] * k2
    m = eye + 0.5 * k + d[..., None, None] * k2
    return n, m


def body_angmom_op(psi, body_index, hbar=1.0, step=None, order=4, symmetric=False,
                   enforce_boundary=True):
    """Body angular momentum component L_k = sum_j m[j, k] D_j per node."""
    _gate_boundary(psi, enforce_boundary)
    if step is None:
        step = _default_step(psi.grid)
    k = int(body_index)
    _, m = frame_fields(psi.grid.nodes)
    total = np.zeros(psi.grid.size, dtype=complex)
    drift = log_density_gradient(psi.grid.nodes) if symmetric else None
    for j in range(3):
        deriv = _chart_derivative(psi, j, step, order)
        if symmetric:
            deriv = deriv + 0.5 * drift[:, j] * psi.amplitudes
        total = total + m[:, j, k] * deriv
    return GridWavefunction(grid=psi.grid, amplitudes=-1j * hbar * total, profile=None)


def _interior_mask(grid, boundary_layers):
    if boundary_layers <= 0:
        return np.ones(grid.size, dtype=bool)
    norms = np.linalg.norm(grid.nodes, axis=1)
    return norms < np.pi - boundary_layers * grid.radial_step


def _relative(residual, psi, mask, hbar):
    scale = hbar * float(np.abs(psi.amplitudes).max())
    return float(np.abs(residual[mask]).max() / scale)


def line_commutator_residual(psi, hbar=1.0, order=2, boundary_nodes=8):
    """Worst relative residual of [P, Q] psi + i hbar psi on a LineGrid.

    P(Q psi) needs two derivative passes, so a few nodes at each end are
    excluded where the zero padding truncates the stencil.
    """
    q_psi = position_op(psi, component=0)
    pq = momentum_op(q_psi, hbar=hbar, order=order).amplitudes
    qp = position_op(momentum_op(psi, hbar=hbar, order=order), component=0).amplitudes
    residual = pq - qp + 1j * hbar * psi.amplitudes
    mask = np.zeros(psi.grid.size, dtype=bool)
    mask[boundary_nodes:-boundary_nodes] = True
    return _relative(residual, psi, mask, hbar)


def chart_commutator_residuals(psi, hbar=1.0, step=None, order=4, boundary_layers=2,
                               enforce_boundary=True):
    """Residuals of [n_(j).L, w^k] psi + i hbar delta_jk psi, (3, 3) matrix.

    Entry (j, k) is the worst interior-node residual relative to
    hbar * max|psi|.  boundary_layers outer shells are excluded;
    passing 0 exposes the seam error of the coordinate function (the
    wrapped coordinate jumps by 2 pi even when the state is smooth).
    """
    _gate_boundary(psi, enforce_boundary)
    if step is None:
        step = _default_step(psi.grid)
    mask = _interior_mask(psi.grid, boundary_layers)
    out = np.empty((3, 3))
    for j in range(3):
        d_psi = angmom_op(psi, j, hbar=hbar, step=step, order=order,
                          enforce_boundary=False)
        for k in range(3):
            d_of_xpsi = angmom_op(position_op(psi, component=k), j, hbar=hbar,
                                  step=step, order=order, enforce_boundary=False)
            comm = d_of_xpsi.amplitudes - psi.grid.nodes[:, k] * d_psi.amplitudes
            residual = comm + 1j * hbar * (1.0 if j == k else 0.0) * psi.amplitudes
            out[j, k] = _relative(residual, psi, mask, hbar)
    return out


def body_commutator_residuals(psi, hbar=1.0, step=None, order=4, boundary_layers=2,
                              enforce_boundary=True):
    """Residuals of [L_k, w^j] psi + i hbar m[j, k] psi, (3, 3) matrix.

    Entry (k, j) is the worst interior-node relative residual; m is the
    dual frame at each node.
    """
    _gate_boundary(psi, enforce_boundary)
    if step is None:
        step = _default_step(psi.grid)
    mask = _interior_mask(psi.grid, boundary_layers)
    _, m = frame_fields(psi.grid.nodes)
    out = np.empty((3, 3))
    for k in range(3):
        l_psi = body_angmom_op(psi, k, hbar=hbar, step=step, order=order,
                               enforce_boundary=False)
        for j in range(3):
            l_of_xpsi = body_angmom_op(position_op(psi, component=j), k, hbar=hbar,
                                       step=step, order=order, enforce_boundary=False)
            comm = l_of_xpsi.amplitudes - psi.grid.nodes[:, j] * l_psi.amplitudes
            residual = comm + 1j * hbar * m[:, j, k] * psi.amplitudes
            out[k, j] = _relative(residual, psi, mask, hbar)
    return out


def angvel_commutator_check(i0, psi, hbar=1.0, step=None, order=4, boundary_layers=2,
                            enforce_boundary=True):
    """Max relative residual of [Omega^j, w^k] psi + i hbar (I0^-1 m^(k))^j psi.

    Rigid-rotor angular velocity Omega = I0^-1 L with the equilibrium
    inertia tensor; reduces to the body commutator check when i0 is the
    identity.
    """
    i0 = np.asarray(i0, dtype=float)
    if i0.shape != (3, 3):
        raise SingularInertiaError("equilibrium inertia must be a 3x3 matrix")
    eigs = np.linalg.eigvalsh(0.5 * (i0 + i0.T))
    if eigs.min() <= 0.0 or not np.all(np.isfinite(eigs)):
        raise SingularInertiaError(f"equilibrium inertia not positive definite: spectrum {eigs}")
    i0_inv = np.linalg.inv(i0)

    _gate_boundary(psi, enforce_boundary)
    if step is None:
        step = _default_step(psi.grid)
    mask = _interior_mask(psi.grid, boundary_layers)
    _, m = frame_fields(psi.grid.nodes)

    l_psi = np.stack([
        body_angmom_op(psi, l, hbar=hbar, step=step, order=order,
                       enforce_boundary=False).amplitudes
        for l in range(3)
    ])
    worst = 0.0
    for k in range(3):
        x_psi = position_op(psi, component=k)
        l_of_xpsi = np.stack([
            body_angmom_op(x_psi, l, hbar=hbar, step=step, order=order,
                           enforce_boundary=False).amplitudes
            for l in range(3)
        ])
        comm_l = l_of_xpsi - psi.grid.nodes[:, k] * l_psi  # [L_l, w^k] psi
        comm_omega = np.einsum("jl,ln->jn", i0_inv, comm_l)
        # dual covector m^(k) is row k of m at each node
        expected = np.einsum("jl,nl->jn", i0_inv, m[:, k, :])
        residual = comm_omega + 1j * hbar * expected * psi.amplitudes
        scale = hbar * float(np.abs(psi.amplitudes).max())
        worst = max(worst, float(np.abs(residual[:, mask]).max() / scale))
    return worst
