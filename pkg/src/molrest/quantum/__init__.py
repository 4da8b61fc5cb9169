"""Grid wavefunctions, operators, and uncertainty checks."""

from .grids import GridWavefunction, LineGrid, So3Grid, wrap_to_ball
from .heisenberg import DispersionReport, dispersion, heisenberg_suite
from .operators import (
    BOUNDARY_MASS_TOL,
    angmom_op,
    angvel_commutator_check,
    body_angmom_op,
    body_commutator_residuals,
    chart_commutator_residuals,
    frame_fields,
    line_commutator_residual,
    momentum_op,
    position_op,
)
from .states import (
    gaussian_line_state,
    geodesic_distance,
    oscillator_state,
    random_line_state,
    random_so3_state,
    so3_gaussian_state,
)

__all__ = [
    "BOUNDARY_MASS_TOL",
    "DispersionReport",
    "GridWavefunction",
    "LineGrid",
    "So3Grid",
    "angmom_op",
    "angvel_commutator_check",
    "body_angmom_op",
    "body_commutator_residuals",
    "chart_commutator_residuals",
    "dispersion",
    "frame_fields",
    "gaussian_line_state",
    "geodesic_distance",
    "heisenberg_suite",
    "line_commutator_residual",
    "momentum_op",
    "oscillator_state",
    "position_op",
    "random_line_state",
    "random_so3_state",
    "so3_gaussian_state",
    "wrap_to_ball",
]
