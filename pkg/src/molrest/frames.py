"""Center-of-mass split, Eckart orientation, internal observables.

The pipeline runs lab configuration -> relative (COM removed) -> rest
frame (body axes from the Eckart conditions) -> internal observables
(mode amplitudes/momenta, electron coordinates, angular velocity), and
back.  The forward and backward maps are exact inverses up to round-off
because the Eckart conditions remove precisely the rotational component
of the mass-weighted displacement.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EckartSolveError, SchemaError, SingularInertiaError
from .lie_so3 import log_map

__all__ = [
    "Configuration",
    "EckartFrame",
    "AMatrix",
    "InternalState",
    "com_split",
    "solve_eckart",
    "to_rest",
    "a_matrix",
    "extract_internal",
    "reconstruct",
    "analyze",
    "load_trajectory",
    "write_trajectory",
]


@dataclass(frozen=True)
class Configuration:
    """Positions and momenta of every particle, nuclei then electrons."""

    nuclei_positions: np.ndarray
    nuclei_momenta: np.ndarray
    electron_positions: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    electron_momenta: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    def __post_init__(self):
        for name in ("nuclei_positions", "nuclei_momenta", "electron_positions",
                     "electron_momenta"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.ndim != 2 or arr.shape[1] != 3:
                raise ValueError(f"{name} must have shape (*, 3), got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{name} has non-finite entries")
            object.__setattr__(self, name, arr)
        if self.nuclei_positions.shape != self.nuclei_momenta.shape:
            raise ValueError("nuclei position/momentum shapes differ")
        if self.electron_positions.shape != self.electron_momenta.shape:
            raise ValueError("electron position/momentum shapes differ")


@dataclass(frozen=True)
class EckartFrame:
    """Solved body orientation.

    rotation : (3, 3) proper orthogonal matrix R mapping body to lab.
    orientation : (3,) rotation vector of R in the canonical ball.
    residual : norm of the orientation condition after the solve.
    degenerate : True when the orientation is not uniquely determined
        (near-degenerate top eigenvalue of the quaternion problem).
    """

    rotation: np.ndarray
    orientation: np.ndarray
    residual: float
    degenerate: bool = False


@dataclass(frozen=True)
class AMatrix:
    """Electron mixing matrix and its exact inverse."""

    a: np.ndarray
    a_inv: np.ndarray


@dataclass(frozen=True)
class InternalState:
    """Internal observables extracted from one configuration.

    Q, P : (K,) mode amplitudes and conjugate momenta.
    q, p : (n, 3) internal electron coordinates and momenta.
    angular_velocity, angular_momentum : (3,) body-frame vectors.
    com_position, com_momentum : the center-of-mass pair that was split
        off, so the configuration can be rebuilt.
    frame : the EckartFrame used for the extraction.
    """

    com_position: np.ndarray
    com_momentum: np.ndarray
    Q: np.ndarray
    P: np.ndarray
    q: np.ndarray
    p: np.ndarray
    angular_velocity: np.ndarray
    angular_momentum: np.ndarray
    frame: EckartFrame


def _check_config(mol, cfg):
    if cfg.nuclei_positions.shape[0] != mol.n_nuclei:
        raise ValueError(
            f"configuration has {cfg.nuclei_positions.shape[0]} nuclei, "
            f"molecule defines {mol.n_nuclei}"
        )
    if cfg.electron_positions.shape[0] != mol.electron_count:
        raise ValueError(
            f"configuration has {cfg.electron_positions.shape[0]} electrons, "
            f"molecule defines {mol.electron_count}"
        )


def com_split(mol, cfg):
    """Split off the center of mass.

    Returns ``(com_position, com_momentum, relative)`` where the relative
    configuration satisfies sum(M R' ) + m sum(r') = 0 and
    sum(P') + sum(p') = 0, and momenta are reduced by each particle's
    mass fraction so a uniform boost leaves the relative data unchanged.
    """
    _check_config(mol, cfg)
    summary = mol.mass_summary()
    total = summary.total_mass
    com = (mol.masses @ cfg.nuclei_positions
           + mol.electron_mass * cfg.electron_positions.sum(axis=0)) / total
    mom = cfg.nuclei_momenta.sum(axis=0) + cfg.electron_momenta.sum(axis=0)
    rel = Configuration(
        nuclei_positions=cfg.nuclei_positions - com,
        nuclei_momenta=cfg.nuclei_momenta - np.outer(mol.masses / total, mom),
        electron_positions=cfg.electron_positions - com,
        electron_momenta=cfg.electron_momenta - (mol.electron_mass / total) * mom,
    )
    return com, mom, rel


def _quaternion_to_matrix(q):
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def solve_eckart(mol, positions):
    """Orient the body frame by the rotational Eckart condition.

    Finds the rotation R maximizing sum_mu M_mu R0_mu . (R^T R'_mu),
    whose stationarity condition is sum_mu M_mu R0_mu x (R^T R'_mu) = 0,
    via the 4x4 symmetric quaternion eigenproblem.

    Parameters
    ----------
    mol : prepared Molecule.
    positions : (N, 3) relative nuclear positions.

    Returns an ``EckartFrame``; ``degenerate`` is set when the top
    eigenvalue is (nearly) repeated and the orientation is arbitrary
    within the degenerate subspace.
    """
    if not mol.prepared:
        raise ValueError("solve_eckart requires a prepared molecule")
    positions = np.asarray(positions, dtype=float)
    if positions.shape != (mol.n_nuclei, 3):
        raise ValueError(f"positions must have shape ({mol.n_nuclei}, 3)")

    c = np.einsum("m,mi,mj->ij", mol.masses, mol.positions, positions)
    sigma = np.trace(c)
    z = np.array([c[1, 2] - c[2, 1], c[2, 0] - c[0, 2], c[0, 1] - c[1, 0]])
    k = np.empty((4, 4))
    k[0, 0] = sigma
    k[0, 1:] = z
    k[1:, 0] = z
    k[1:, 1:] = c + c.T - sigma * np.eye(3)
    evals, evecs = np.linalg.eigh(k)

    gap = (evals[3] - evals[2]) / max(1.0, abs(evals[3]))
    rotation = _quaternion_to_matrix(evecs[:, 3])

    body = positions @ rotation
    residual_vec = np.einsum("m,mk->k", mol.masses, np.cross(mol.positions, body))
    residual = float(np.linalg.norm(residual_vec))
    scale = float(
        np.sum(mol.masses * np.linalg.norm(mol.positions, axis=1)
               * np.linalg.norm(positions, axis=1))
    )
    if not np.isfinite(residual) or residual > 1e-8 * max(scale, 1e-300):
        raise EckartSolveError(
            f"orientation solve failed: residual {residual:.3e} for scale {scale:.3e}"
        )
    return EckartFrame(
        rotation=rotation,
        orientation=log_map(rotation),
        residual=residual,
        degenerate=bool(gap < 1e-9),
    )


def to_rest(frame, cfg):
    """Rotate a relative configuration into the body (rest) frame."""
    r = frame.rotation
    return Configuration(
        nuclei_positions=cfg.nuclei_positions @ r,
        nuclei_momenta=cfg.nuclei_momenta @ r,
        electron_positions=cfg.electron_positions @ r,
        electron_momenta=cfg.electron_momenta @ r,
    )


def a_matrix(mol):
    """Electron mixing matrix A = I + ((s - 1)/n) J, s = sqrt(M/Mtot).

    J is the all-ones matrix.  The inverse is closed-form with s
    replaced by 1/s, exact because the two coefficients a, b satisfy
    a + b + n a b = 0.  For n = 0 both matrices are empty.
    """
    n = mol.electron_count
    if n == 0:
        empty = np.zeros((0, 0))
        return AMatrix(a=empty, a_inv=empty)
    summary = mol.mass_summary()
    s = np.sqrt(summary.nuclear_mass / summary.total_mass)
    ones = np.ones((n, n))
    return AMatrix(
        a=np.eye(n) + (s - 1.0) / n * ones,
        a_inv=np.eye(n) + (1.0 / s - 1.0) / n * ones,
    )


def _instantaneous_inertia(mol, basis, q_amplitudes):
    from .angmom import build_inertia, inertia_at  # deferred: angmom uses Configuration

    return inertia_at(build_inertia(mol, basis), q_amplitudes)


def extract_internal(mol, basis, frame, rest, com_position=None, com_momentum=None):
    """Extract internal observables from a rest-frame configuration.

    Mode amplitudes pair displacements with the dual directions, mode
    momenta pair rest momenta with the basis directions; electron
    observables are unmixed with the inverse A-matrix; the angular
    velocity inverts the three-term split of the rest-frame angular
    momentum (rigid + mode-coupling + electronic) using the
    instantaneous inertia tensor.

    Raises ``SingularInertiaError`` when the instantaneous inertia is
    singular or too ill-conditioned to invert trustworthily.
    """
    from .angmom import rest_angmom  # deferred, see above

    _check_config(mol, rest)
    sqrt_m = np.sqrt(mol.masses)
    disp = rest.nuclei_positions - mol.positions
    amp = np.einsum("m,mak,mk->a", sqrt_m, basis.x_dual, disp)
    mom = np.einsum("m,mak,mk->a", 1.0 / sqrt_m, basis.x, rest.nuclei_momenta)

    mix = a_matrix(mol)
    q = mix.a_inv @ rest.electron_positions
    p = mix.a_inv @ rest.electron_momenta

    total_l = rest_angmom(rest)
    defect = np.cross(np.einsum("a,mak->mk", amp, basis.x),
                      np.einsum("a,mak->mk", mom, basis.x_dual)).sum(axis=0)
    electronic = np.cross(q, p).sum(axis=0) if q.size else np.zeros(3)

    inertia = _instantaneous_inertia(mol, basis, amp)
    if np.linalg.cond(inertia) > 1e12:
        raise SingularInertiaError(
            f"instantaneous inertia is singular (cond > 1e12) for Q = {amp}"
        )
    omega = np.linalg.solve(inertia, total_l - defect - electronic)

    zeros = np.zeros(3)
    return InternalState(
        com_position=zeros if com_position is None else np.asarray(com_position, float),
        com_momentum=zeros if com_momentum is None else np.asarray(com_momentum, float),
        Q=amp,
        P=mom,
        q=q,
        p=p,
        angular_velocity=omega,
        angular_momentum=total_l,
        frame=frame,
    )


def reconstruct(mol, basis, state):
    """Rebuild the full lab configuration from an InternalState.

    Exact inverse of the analyze pipeline up to round-off: rest-frame
    blocks are assembled from the internal observables (including the
    light-particle back-reaction shifts), rotated out of the body frame,
    and the center-of-mass pair is added back.
    """
    summary = mol.mass_summary()
    nuclear_mass = summary.nuclear_mass
    sqrt_m = np.sqrt(mol.masses)
    mix = a_matrix(mol)

    if state.q.size:
        r_el = mix.a @ state.q
        p_el = mix.a @ state.p
        shift_q = r_el.sum(axis=0) * (mol.electron_mass / nuclear_mass)
        shift_p = p_el.sum(axis=0) / nuclear_mass
    else:
        r_el = state.q
        p_el = state.p
        shift_q = np.zeros(3)
        shift_p = np.zeros(3)

    rest_pos = (mol.positions
                + np.einsum("a,mak->mk", state.Q, basis.x) / sqrt_m[:, None]
                - shift_q)
    rest_mom = (np.cross(state.angular_velocity, mol.masses[:, None] * mol.positions)
                + sqrt_m[:, None] * np.einsum("a,mak->mk", state.P, basis.x_dual)
                - np.outer(mol.masses, shift_p))

    r = state.frame.rotation
    com = state.com_position
    mom = state.com_momentum
    return Configuration(
        nuclei_positions=rest_pos @ r.T + com,
        nuclei_momenta=rest_mom @ r.T + np.outer(mol.masses / summary.total_mass, mom),
        electron_positions=r_el @ r.T + com,
        electron_momenta=p_el @ r.T + (mol.electron_mass / summary.total_mass) * mom,
    )


def analyze(mol, basis, cfg):
    """Full pipeline: split the COM, orient, extract internal observables."""
    com, mom, rel = com_split(mol, cfg)
    frame = solve_eckart(mol, rel.nuclei_positions)
    rest = to_rest(frame, rel)
    return extract_internal(mol, basis, frame, rest,
                            com_position=com, com_momentum=mom)


# --- trajectory I/O --------------------------------------------------------


def load_trajectory(mol, path):
    """Read configurations from an extended-xyz style trajectory file.

    Each frame is ``count`` / comment / ``count`` particle lines of the
    form ``species x y z px py pz``.  Nuclei come first (any species
    label except ``e``), then the electrons (species ``e``).  The count
    must equal N + n of the molecule.  Raises ``SchemaError`` (with the
    line number) on any malformed content.
    """
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()

    n_total = mol.n_nuclei + mol.electron_count
    configs = []
    i = 0
    while i < len(lines):
        if not lines[i].strip():
            i += 1
            continue
        try:
            count = int(lines[i].strip())
        except ValueError:
            raise SchemaError(f"line {i + 1}: expected a particle count")
        if count != n_total:
            raise SchemaError(
                f"line {i + 1}: frame holds {count} particles, molecule needs {n_total}"
            )
        if i + 2 + count > len(lines):
            raise SchemaError(f"line {i + 1}: truncated frame")
        rows = []
        for j in range(count):
            line_no = i + 3 + j
            parts = lines[i + 2 + j].split()
            if len(parts) != 7:
                raise SchemaError(
                    f"line {line_no}: expected 'species x y z px py pz' (7 fields)"
                )
            try:
                rows.append((parts[0], [float(v) for v in parts[1:]]))
            except ValueError:
                raise SchemaError(f"line {line_no}: non-numeric coordinate")
        for j, (species, _) in enumerate(rows):
            if j < mol.n_nuclei and species == "e":
                raise SchemaError(
                    f"line {i + 3 + j}: electron row among the first {mol.n_nuclei} "
                    "(nuclei must come first)"
                )
            if j >= mol.n_nuclei and species != "e":
                raise SchemaError(f"line {i + 3 + j}: expected electron row (species 'e')")
        data = np.array([vals for _, vals in rows])
        configs.append(
            Configuration(
                nuclei_positions=data[: mol.n_nuclei, :3],
                nuclei_momenta=data[: mol.n_nuclei, 3:],
                electron_positions=data[mol.n_nuclei:, :3],
                electron_momenta=data[mol.n_nuclei:, 3:],
            )
        )
        i += 2 + count
    if not configs:
        raise SchemaError("trajectory holds no frames")
    return configs


def write_trajectory(mol, path, configs, comment="frame"):
    """Write configurations in the format read by load_trajectory."""
    n_total = mol.n_nuclei + mol.electron_count
    with open(path, "w", encoding="utf-8") as fh:
        for idx, cfg in enumerate(configs):
            _check_config(mol, cfg)
            fh.write(f"{n_total}\n{comment} {idx}\n")
            for mu in range(mol.n_nuclei):
                row = [*cfg.nuclei_positions[mu], *cfg.nuclei_momenta[mu]]
                fh.write(f"X{mu} " + " ".join(repr(float(v)) for v in row) + "\n")
            for nu in range(mol.electron_count):
                row = [*cfg.electron_positions[nu], *cfg.electron_momenta[nu]]
                fh.write("e " + " ".join(repr(float(v)) for v in row) + "\n")
