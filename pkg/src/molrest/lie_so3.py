"""Rotation-group primitives: exponential chart and the Killing frame.

Orientation is parametrized by a rotation vector ``omega`` (axis times
angle) restricted to the canonical ball ``||omega|| <= pi``.  The module
provides the exponential and logarithm maps between vectors and rotation
matrices, and the frame field ``n``/``m`` that converts between partial
derivatives in the chart and body-frame angular momentum components:

    R(omega)^-1 dR/domega^j = [n_(j)]x     (columns of the n-matrix)
    m = n^-1                               (rows are the dual frame)

All formulas are closed-form polynomials in the cross-product matrix
``[omega]x`` with scalar coefficients in the angle; coefficients switch
to their Taylor series below ``theta = 1e-4`` so nothing degrades at the
origin.
"""

from dataclasses import dataclass

import numpy as np

from .errors import GridError

__all__ = [
    "EPS_BOUNDARY",
    "KillingFrame",
    "skew",
    "vee",
    "generators",
    "exp_map",
    "log_map",
    "killing_frame",
    "haar_density",
    "log_density_gradient",
    "rotate_observable",
]

# Angle below which trig coefficient ratios switch to series.
_SMALL = 1e-4

# Frame field is singular on the sphere ||omega|| = pi; reject a layer near it.
EPS_BOUNDARY = 1e-6


def skew(v):
    """Cross-product matrix: skew(v) @ x == cross(v, x).

    Accepts a single 3-vector or an (..., 3) stack.
    """
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def vee(a):
    """Inverse of skew on antisymmetric matrices (antisymmetrizes first)."""
    a = np.asarray(a, dtype=float)
    w = 0.5 * (a - np.swapaxes(a, -1, -2))
    return np.stack([w[..., 2, 1], w[..., 0, 2], w[..., 1, 0]], axis=-1)


def generators():
    """The three rotation generators G_k, with G_k @ x == cross(e_k, x)."""
    return skew(np.eye(3))


def _check_omega(omega):
    omega = np.asarray(omega, dtype=float)
    if omega.shape != (3,):
        raise ValueError(f"orientation vector must have shape (3,), got {omega.shape}")
    if not np.all(np.isfinite(omega)):
        raise ValueError("orientation vector has non-finite entries")
    theta = float(np.linalg.norm(omega))
    if theta > np.pi + 1e-10:
        raise ValueError(f"orientation vector norm {theta:.6f} outside the canonical ball")
    return omega, theta


def exp_map(omega):
    """Rotation matrix of a rotation vector (Rodrigues formula).

    Parameters
    ----------
    omega : array, shape (3,)
        Rotation vector with norm <= pi.

    Returns
    -------
    (3, 3) array, a proper orthogonal matrix.
    """
    omega, theta = _check_omega(omega)
    t2 = theta * theta
    if theta < _SMALL:
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
    else:
        a = np.sin(theta) / theta
        b = (1.0 - np.cos(theta)) / t2
    k = skew(omega)
    return np.eye(3) + a * k + b * (k @ k)


def _check_rotation(r, atol=1e-8):
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        raise ValueError(f"rotation matrix must have shape (3, 3), got {r.shape}")
    if not np.allclose(r.T @ r, np.eye(3), atol=atol):
        raise ValueError("matrix is not orthogonal")
    if np.linalg.det(r) < 0.0:
        raise ValueError("matrix is orthogonal but improper (det = -1)")
    return r


def log_map(r):
    """Rotation vector of a rotation matrix, with norm <= pi.

    Inverse of exp_map on the canonical ball.  Near the angle pi the
    axis is recovered from the symmetric part of R, which stays
    well-conditioned where the antisymmetric part vanishes.
    """
    r = _check_rotation(r)
    c = 0.5 * (np.trace(r) - 1.0)
    c = min(1.0, max(-1.0, c))
    v = vee(r)  # = sin(theta) * axis
    s = float(np.linalg.norm(v))
    # atan2 keeps the angle well-conditioned at both ends, where arccos
    # alone would lose half the digits.
    theta = float(np.arctan2(s, c))

    if theta < _SMALL:
        # omega = v * theta/sin(theta); the quadratic term suffices here.
        return v * (1.0 + theta * theta / 6.0)
    if s > _SMALL:
        return v * (theta / s)

    # theta within ~1e-4 of pi: uu^T = (sym(R) - c I) / (1 - c).
    outer = (0.5 * (r + r.T) - c * np.eye(3)) / (1.0 - c)
    j = int(np.argmax(np.diag(outer)))
    u = outer[:, j] / np.sqrt(max(outer[j, j], 0.0))
    u /= np.linalg.norm(u)
    s = float(u @ v)
    if abs(s) > 1e-12:
        u = u if s > 0.0 else -u
    else:
        # Antipodal: +pi u and -pi u are the same rotation; fix a sign.
        k = int(np.argmax(np.abs(u)))
        if u[k] < 0.0:
            u = -u
    return theta * u


@dataclass(frozen=True)
class KillingFrame:
    """Frame field at a point of the chart.

    n : (3, 3) array whose column j gives the body components of the
        angular-momentum direction paired with d/domega^j.
    m : (3, 3) array, inverse of n; column k converts chart derivatives
        into the body component L_k (L = m^T D), and row k is the dual
        covector m^(k) with m^(k) . n_(j) = delta.
    """

    n: np.ndarray
    m: np.ndarray


def _frame_coefficients(theta):
    t2 = theta * theta
    if theta < _SMALL:
        c2 = 0.5 - t2 / 24.0 + t2 * t2 / 720.0
        c3 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
        d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    else:
        c2 = (1.0 - np.cos(theta)) / t2
        c3 = (theta - np.sin(theta)) / (t2 * theta)
        d = 1.0 / t2 - (1.0 + np.cos(theta)) / (2.0 * theta * np.sin(theta))
    return c2, c3, d


def killing_frame(omega, eps_boundary=EPS_BOUNDARY):
    """n- and m-matrices of the chart at ``omega``.

    Raises
    ------
    GridError
        If ``||omega|| >= pi - eps_boundary``, where the frame field is
        (nearly) singular.
    """
    omega, theta = _check_omega(omega)
    if theta >= np.pi - eps_boundary:
        raise GridError(
            f"killing frame near-singular: |omega| = {theta:.9f} >= pi - {eps_boundary:g}"
        )
    c2, c3, d = _frame_coefficients(theta)
    k = skew(omega)
    k2 = k @ k
    n = np.eye(3) - c2 * k + c3 * k2
    m = np.eye(3) + 0.5 * k + d * k2
    return KillingFrame(n=n, m=m)


def haar_density(omega):
    """Normalized Haar density on the ball, (1 - cos theta)/(4 pi^2 theta^2).

    Accepts (..., 3) stacks; the theta -> 0 limit 1/(8 pi^2) is handled.
    """
    omega = np.asarray(omega, dtype=float)
    theta = np.linalg.norm(omega, axis=-1)
    t2 = theta * theta
    # (1 - cos) cancels badly for small angles; the quartic series is
    # exact to ~1e-22 relative at the 1e-3 switch point.
    small = theta < 1e-3
    safe = np.where(small, 1.0, t2)
    ratio = np.where(small, 0.5 - t2 / 24.0 + t2 * t2 / 720.0,
                     (1.0 - np.cos(theta)) / safe)
    return ratio / (4.0 * np.pi**2)


def log_density_gradient(omega):
    """Gradient of log(haar density), d_j ln rho = f(theta) * omega_j.

    f = (cot(theta/2) - 2/theta)/theta, series -1/6 - theta^2/360 - ...
    near the origin.  Accepts (..., 3) stacks.
    """
    omega = np.asarray(omega, dtype=float)
    theta = np.linalg.norm(omega, axis=-1)
    t2 = theta * theta
    small = theta < 1e-3
    safe = np.where(small, 1.0, theta)
    with np.errstate(invalid="ignore", divide="ignore"):
        f_exact = (1.0 / np.tan(safe / 2.0) - 2.0 / safe) / safe
    f_series = -1.0 / 6.0 - t2 / 360.0 - t2 * t2 / 15120.0
    f = np.where(small, f_series, f_exact)
    return f[..., None] * omega


def rotate_observable(r, vectors):
    """Apply a rotation to a vector or a stack of vectors: R @ v."""
    r = _check_rotation(r)
    vectors = np.asarray(vectors, dtype=float)
    return vectors @ r.T
