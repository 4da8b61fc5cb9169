"""Dispersions and uncertainty-product reports.

A dispersion is sqrt(<A^2> - <A>^2) under the grid quadrature, computed
as ||A psi||^2 - |<psi, A psi>|^2 so the variance is nonnegative by
Cauchy-Schwarz up to rounding.  The suite builder pairs conjugate
observables per kind:

  vibrational: mode momentum vs mode amplitude, bound hbar/2 per mode
               (cross-mode bound 0);
  electronic:  per-electron Cartesian momentum vs coordinate, bound
               hbar/2 only for the same electron and same component;
  rotational:  chart angular momentum n_(j).L vs orientation
               coordinate omega^k, bound hbar/2 only for j = k.

Rotational dispersions are only meaningful for states concentrated away
from the chart seam: when the boundary mass of a state reaches 1e-8 the
report's satisfied field is None (indeterminate) rather than a verdict.
Angular-momentum dispersions use the Haar-symmetrized derivative so the
operator is hermitian under the weighted quadrature.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GridError
from .grids import GridWavefunction, LineGrid, So3Grid
from .operators import (
    BOUNDARY_MASS_TOL,
    angmom_op,
    body_angmom_op,
    momentum_op,
    position_op,
)

__all__ = ["DispersionReport", "dispersion", "heisenberg_suite"]


@dataclass(frozen=True)
class DispersionReport:
    """One uncertainty-product row: Delta_a * Delta_b vs its lower bound.

    satisfied is True/False against bound - product <= tolerance, or
    None when the state's boundary mass makes the orientation
    dispersion indeterminate.
    """

    observable_a: str
    observable_b: str
    delta_a: float
    delta_b: float
    product: float
    bound: float
    satisfied: object
    boundary_mass: float = 0.0

    def to_dict(self):
        return {
            "observable_a": self.observable_a,
            "observable_b": self.observable_b,
            "delta_a": float(self.delta_a),
            "delta_b": float(self.delta_b),
            "product": float(self.product),
            "bound": float(self.bound),
            "satisfied": self.satisfied,
            "boundary_mass": float(self.boundary_mass),
        }


def dispersion(psi, op):
    """sqrt(<A^2> - <A>^2) for a normalized state and an operator handle.

    op maps a GridWavefunction to a GridWavefunction.  Variances inside
    [-1e-12, 0) are clamped to zero (quadrature rounding); anything more
    negative signals a broken quadrature and raises.
    """
    norm = psi.norm()
    if abs(norm - 1.0) > 1e-8:
        raise GridError(f"dispersion needs a normalized state, got norm {norm!r}")
    weights = psi.weights
    a_psi = op(psi).amplitudes
    mean = complex(np.sum(weights * np.conj(psi.amplitudes) * a_psi))
    second = float(np.sum(weights * np.abs(a_psi) ** 2))
    variance = second - (mean.real**2 + mean.imag**2)
    if variance < 0.0:
        if variance < -1e-12:
            raise GridError(f"quadrature failure: variance {variance:.3e}")
        variance = 0.0
    return math.sqrt(variance)


def _pair_rows(labels_a, deltas_a, labels_b, deltas_b, bounds, tolerance,
               boundary=None):
    rows = []
    for ia, (la, da) in enumerate(zip(labels_a, deltas_a)):
        for ib, (lb, db) in enumerate(zip(labels_b, deltas_b)):
            bound = bounds(ia, ib)
            product = da * db
            bmass = 0.0 if boundary is None else boundary(ia, ib)
            if bmass >= BOUNDARY_MASS_TOL:
                verdict = None
            else:
                verdict = bool(bound - product <= tolerance)
            rows.append(
                DispersionReport(
                    observable_a=la,
                    observable_b=lb,
                    delta_a=float(da),
                    delta_b=float(db),
                    product=float(product),
                    bound=float(bound),
                    satisfied=verdict,
                    boundary_mass=float(bmass),
                )
            )
    return rows


def _check_line_states(states, what):
    for s in states:
        if not isinstance(s, GridWavefunction) or not isinstance(s.grid, LineGrid):
            raise GridError(f"{what} checks need LineGrid states")


def heisenberg_suite(psi_set, kind, hbar=1.0, tolerance=None, fixed_frame=False,
                     fd_step=5e-3, order=4):
    """Uncertainty reports for every conjugate pair of a state family.

    psi_set layout per kind:
      vibrational: one LineGrid state per mode;
      electronic:  one sequence of three LineGrid states per electron
                   (Cartesian components of a product state);
      rotational:  So3Grid states.
    tolerance defaults to the quadrature allowance 1e-6 * hbar.
    fixed_frame swaps the chart operator n_(j)(omega).L for the body
    component L_j referenced at the identity orientation.
    """
    if tolerance is None:
        tolerance = 1e-6 * hbar
    if tolerance <= 0.0:
        raise GridError("tolerance must be positive")
    half = 0.5 * hbar

    if kind == "vibrational":
        states = list(psi_set)
        if not states:
            raise GridError("empty state set")
        _check_line_states(states, "vibrational")
        d_p = [dispersion(s, lambda t: momentum_op(t, hbar=hbar, order=order)) for s in states]
        d_q = [dispersion(s, position_op) for s in states]
        la = [f"P_{i + 1}" for i in range(len(states))]
        lb = [f"Q^{i + 1}" for i in range(len(states))]
        return _pair_rows(la, d_p, lb, d_q,
                          lambda a, b: half if a == b else 0.0, tolerance)

    if kind == "electronic":
        groups = [list(g) for g in psi_set]
        if not groups:
            raise GridError("empty state set")
        for g in groups:
            if len(g) != 3:
                raise GridError("electronic states come as one triple per electron")
            _check_line_states(g, "electronic")
        flat = [s for g in groups for s in g]
        d_p = [dispersion(s, lambda t: momentum_op(t, hbar=hbar, order=order)) for s in flat]
        d_q = [dispersion(s, position_op) for s in flat]
        la = [f"p_({nu + 1})_{j + 1}" for nu in range(len(groups)) for j in range(3)]
        lb = [f"q_({nu + 1})^{j + 1}" for nu in range(len(groups)) for j in range(3)]
        return _pair_rows(la, d_p, lb, d_q,
                          lambda a, b: half if a == b else 0.0, tolerance)

    if kind == "rotational":
        states = list(psi_set)
        if not states:
            raise GridError("empty state set")
        for s in states:
            if not isinstance(s, GridWavefunction) or not isinstance(s.grid, So3Grid):
                raise GridError("rotational checks need So3Grid states")
        rows = []
        for idx, s in enumerate(states):
            bmass = s.boundary_mass()
            gated = bmass >= BOUNDARY_MASS_TOL
            tag = f"[{idx + 1}]" if len(states) > 1 else ""

            def l_op(t, j):
                if fixed_frame:
                    return body_angmom_op(t, j, hbar=hbar, step=fd_step, order=order,
                                          symmetric=True, enforce_boundary=False)
                return angmom_op(t, j, hbar=hbar, step=fd_step, order=order,
                                 symmetric=True, enforce_boundary=False)

            d_l = [dispersion(s, lambda t, j=j: l_op(t, j)) for j in range(3)]
            d_w = [dispersion(s, lambda t, k=k: position_op(t, component=k)) for k in range(3)]
            la = [(f"L_{j + 1}" if fixed_frame else f"n_({j + 1}).L") + tag for j in range(3)]
            lb = [f"omega^{k + 1}" + tag for k in range(3)]
            rows.extend(
                _pair_rows(la, d_l, lb, d_w,
                           lambda a, b: half if a == b else 0.0, tolerance,
                           boundary=lambda a, b: bmass)
            )
        return rows

    raise GridError(f"unknown suite kind {kind!r}")
