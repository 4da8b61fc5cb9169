"""Inertia tensors and angular-momentum bookkeeping.

The instantaneous inertia tensor is affine in the mode amplitudes,
I(Q) = I0 + sum_alpha Q^alpha I_alpha, where I0 is the (diagonal)
equilibrium tensor and the coupling tensors

    (I_alpha)_kl = sum_mu sqrt(M_mu) (e_k x X_{mu alpha}) . (e_l x R0_mu)

are symmetric exactly when the mode basis satisfies the rotational sum
rule; symmetry is asserted, never patched up by symmetrization.  The
rest-frame angular momentum splits into rigid I(Q) Omega, a
mode-coupling (deformation) term, and an electronic term.
"""

from dataclasses import dataclass

import numpy as np

from .errors import EckartViolationError, SingularInertiaError
from .molecule import equilibrium_inertia

__all__ = [
    "InertiaModel",
    "build_inertia",
    "inertia_at",
    "pd_bound",
    "relative_angmom",
    "rest_angmom",
    "decompose_angmom",
]


@dataclass(frozen=True)
class InertiaModel:
    """Equilibrium inertia i0 and per-mode coupling tensors i_alpha."""

    i0: np.ndarray
    i_alpha: np.ndarray  # (K, 3, 3)


def build_inertia(mol, basis, symmetry_tol=1e-10):
    """Assemble the InertiaModel for a molecule and mode basis.

    Raises ``EckartViolationError`` (carrying the measured residual)
    when some coupling tensor is asymmetric beyond ``symmetry_tol``
    relative to the equilibrium scale, which happens exactly when the
    basis violates the rotational sum rule.
    """
    i0 = equilibrium_inertia(mol)
    sqrt_m = np.sqrt(mol.masses)
    x = basis.x
    dot = np.einsum("m,mak,mk->a", sqrt_m, x, mol.positions)
    outer = np.einsum("m,mk,mal->akl", sqrt_m, mol.positions, x)
    i_alpha = dot[:, None, None] * np.eye(3)[None, :, :] - outer
    if i_alpha.size:
        asym = float(np.max(np.abs(i_alpha - np.transpose(i_alpha, (0, 2, 1)))))
    else:
        asym = 0.0
    scale = max(float(np.trace(i0)), 1e-300)
    if asym > symmetry_tol * scale:
        raise EckartViolationError(
            f"inertia coupling tensors asymmetric (residual {asym:.3e}, "
            f"scale {scale:.3e}): mode basis violates the rotational sum rule",
            residual=asym,
        )
    return InertiaModel(i0=i0, i_alpha=i_alpha)


def inertia_at(model, q, checked=False):
    """Instantaneous inertia I0 + sum_alpha Q^alpha I_alpha.

    With ``checked=True`` the smallest eigenvalue is monitored and loss
    of positive-definiteness raises ``SingularInertiaError`` instead of
    being silently passed along.
    """
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != (model.i_alpha.shape[0],):
        raise ValueError(
            f"expected {model.i_alpha.shape[0]} mode amplitudes, got shape {q.shape}"
        )
    inertia = model.i0 + np.einsum("a,akl->kl", q, model.i_alpha)
    if checked:
        smallest = float(np.linalg.eigvalsh(inertia)[0])
        if smallest <= 0.0:
            raise SingularInertiaError(
                f"instantaneous inertia not positive-definite "
                f"(smallest eigenvalue {smallest:.3e}) at |Q| = {np.linalg.norm(q):.3e}"
            )
    return inertia


def pd_bound(model):
    """Amplitude radius within which I(Q) is guaranteed positive-definite.

    For ||Q||_2 below the returned value the perturbation
    sum Q^alpha I_alpha cannot reach the smallest eigenvalue of i0.
    """
    smallest = float(np.linalg.eigvalsh(model.i0)[0])
    if model.i_alpha.size == 0:
        return np.inf
    norms = np.linalg.norm(model.i_alpha, ord=2, axis=(1, 2))
    total = float(np.sqrt(np.sum(norms**2)))
    return np.inf if total == 0.0 else smallest / total


def relative_angmom(relative):
    """Orbital angular momentum of a relative configuration about the COM."""
    l_vec = np.cross(relative.nuclei_positions, relative.nuclei_momenta).sum(axis=0)
    if relative.electron_positions.size:
        l_vec = l_vec + np.cross(relative.electron_positions,
                                 relative.electron_momenta).sum(axis=0)
    return l_vec


def rest_angmom(rest):
    """Orbital angular momentum evaluated on rest-frame data.

    Same classical expression as relative_angmom; the symmetrized
    operator ordering reduces to it on commuting samples.
    """
    return relative_angmom(rest)


def decompose_angmom(model, basis, state):
    """Three-term split of the rest angular momentum.

    Returns ``(rotational, deformation, electronic)`` with
    rotational = I(Q) Omega, deformation the mode-coupling cross term,
    electronic the internal electron term.  Their sum reproduces the
    rest-frame angular momentum of the corresponding configuration.
    """
    rotational = inertia_at(model, state.Q) @ state.angular_velocity
    deformation = np.cross(
        np.einsum("a,mak->mk", state.Q, basis.x),
        np.einsum("a,mak->mk", state.P, basis.x_dual),
    ).sum(axis=0)
    if state.q.size:
        electronic = np.cross(state.q, state.p).sum(axis=0)
    else:
        electronic = np.zeros(3)
    return rotational, deformation, electronic
