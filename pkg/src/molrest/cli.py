"""Command-line front end.

Subcommands take a molecule file (and for the trajectory-driven ones an
extended-xyz trajectory), run the corresponding pipeline, and emit a
machine-readable report:

  validate     mode-basis sum rules and equilibrium diagnostics
  modes        mode basis shape and frequencies
  frame        per-frame orientation solve and internal observables
  decompose    three-term angular momentum split per frame
  heisenberg   uncertainty-product reports for seeded state families
  commutators  canonical commutator residual table

Exit codes: 0 when every check passes its tolerance, 1 for input errors
(bad flags, unreadable or malformed files), 2 when a check fails.
Reports are deterministic: the same input and --seed produce
byte-identical output (JSON keys sorted, shortest round-trip float
formatting).
"""

import argparse
import csv
import io
import json
import sys

from dataclasses import dataclass, replace

import numpy as np

from .angmom import build_inertia, decompose_angmom
from .errors import (
    BoundaryMassError,
    CollinearGeometryError,
    EckartSolveError,
    EckartViolationError,
    GridError,
    SchemaError,
    SingularInertiaError,
)
from .frames import analyze, load_trajectory, reconstruct
from .modes import build_modes, verify_eckart
from .molecule import equilibrium_inertia, load_molecule, prepare_equilibrium
from .quantum import (
    LineGrid,
    So3Grid,
    angvel_commutator_check,
    body_commutator_residuals,
    chart_commutator_residuals,
    gaussian_line_state,
    heisenberg_suite,
    line_commutator_residual,
    random_line_state,
    random_so3_state,
    so3_gaussian_state,
)

__all__ = ["RunConfig", "parse_args", "run", "main"]

COMMANDS = ("validate", "modes", "frame", "decompose", "heisenberg", "commutators")

# residual ceilings for the commutator table; the canonical line check
# runs the 2nd-order stencil so its measured convergence order is
# meaningful, the orientation checks run the 4th-order default
LINE_CANONICAL_TOL = 1e-6
CHART_TOL = 1e-5
BODY_TOL = 1e-5
ANGVEL_TOL = 1e-4


@dataclass
class RunConfig:
    """Everything one invocation needs.

    tol_roundtrip and line_extent are fixed policy (no flags): the
    reconstruction check is an internal consistency gate, and the line
    grid always spans [-line_extent, line_extent].
    """

    command: str
    input_path: str
    trajectory_path: str = None
    output_path: str = None
    format: str = "json"
    tol_eckart: float = 1e-10
    tol_roundtrip: float = 1e-9
    tol_quad: float = 1e-6
    grid_line: int = 16384
    line_extent: float = 10.0
    grid_theta: int = 64
    grid_dirs: int = 128
    hbar: float = None
    seed: int = 0

    def validate(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise ValueError(f"format must be json or csv, got {self.format!r}")
        for name in ("tol_eckart", "tol_roundtrip", "tol_quad"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name.replace('_', '-')} must be positive")
        if self.grid_line < 64:
            raise ValueError("--grid-line must be at least 64")
        if self.grid_theta < 16:
            raise ValueError("--grid-theta must be at least 16")
        if self.grid_dirs < 32:
            raise ValueError("--grid-dirs must be at least 32")
        if not self.line_extent > 0.0:
            raise ValueError("line extent must be positive")
        if self.hbar is not None and not self.hbar > 0.0:
            raise ValueError("--hbar must be positive")


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the exit contract
    # reserves 2 for check failures, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_args(argv=None):
    parser = _Parser(
        prog="molrest",
        description="Eckart-frame internal observables and uncertainty checks.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--input", required=True, help="molecule JSON file")
    parser.add_argument("--trajectory", help="extended-xyz trajectory file")
    parser.add_argument("--output", help="report file (default stdout)")
    parser.add_argument("--format", default="json", choices=("json", "csv"))
    parser.add_argument("--tol-eckart", type=float, default=1e-10,
                        help="mode sum-rule and frame residual ceiling")
    parser.add_argument("--tol-quad", type=float, default=1e-6,
                        help="uncertainty-product quadrature allowance (times hbar)")
    parser.add_argument("--grid-line", type=int, default=16384,
                        help="line grid points (min 64)")
    parser.add_argument("--grid-theta", type=int, default=64,
                        help="rotation-angle shells (min 16)")
    parser.add_argument("--grid-dirs", type=int, default=128,
                        help="direction nodes per shell (min 32)")
    parser.add_argument("--hbar", type=float, default=None,
                        help="override the molecule's hbar")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized state families")
    ns = parser.parse_args(argv)
    return RunConfig(
        command=ns.command,
        input_path=ns.input,
        trajectory_path=ns.trajectory,
        output_path=ns.output,
        format=ns.format,
        tol_eckart=ns.tol_eckart,
        tol_quad=ns.tol_quad,
        grid_line=ns.grid_line,
        grid_theta=ns.grid_theta,
        grid_dirs=ns.grid_dirs,
        hbar=ns.hbar,
        seed=ns.seed,
    )


# --- report plumbing -------------------------------------------------------


def _clean(value):
    """Recursively convert report values to plain JSON-friendly types."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_clean(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def _flatten(value, prefix, rows):
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(value[k], f"{prefix}.{k}" if prefix else str(k), rows)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _flatten(v, f"{prefix}.{i}", rows)
    else:
        rows.append((prefix, value))


def _csv_cell(value):
    if value is None:
        return "indeterminate"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _render(report, fmt):
    report = _clean(report)
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    rows = report.get("rows")
    if isinstance(rows, list) and rows and all(isinstance(r, dict) for r in rows):
        header = sorted(rows[0])
        writer.writerow(header)
        for r in rows:
            writer.writerow([_csv_cell(r.get(h)) for h in header])
        scalars = {k: v for k, v in report.items() if k != "rows"}
    else:
        scalars = report
    flat = []
    _flatten(scalars, "", flat)
    for key, value in flat:
        writer.writerow([key, _csv_cell(value)])
    return buf.getvalue()


def _emit(report, config):
    text = _render(report, config.format)
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- commands --------------------------------------------------------------


def _load(config):
    mol = prepare_equilibrium(load_molecule(config.input_path))
    if config.hbar is not None:
        mol = replace(mol, hbar=config.hbar)
    return mol


def _residual_block(mol, basis, tol):
    res = verify_eckart(mol, basis)
    com = mol.masses @ mol.positions
    inertia = equilibrium_inertia(mol)
    off = inertia - np.diag(np.diag(inertia))
    return {
        "translation": res.translation,
        "rotation": res.rotation,
        "duality": res.duality,
        "com_norm": float(np.linalg.norm(com)),
        "inertia_offdiagonal": float(np.abs(off).max()),
    }, max(res.translation, res.rotation, res.duality) <= tol


def _cmd_validate(config, mol, rng):
    basis = build_modes(mol, rng=rng)
    residuals, ok = _residual_block(mol, basis, config.tol_eckart)
    scale = float(np.abs(mol.positions).max())
    geom_ok = residuals["com_norm"] <= config.tol_eckart * max(1.0, scale)
    return {
        "command": "validate",
        "n_modes": basis.n_modes,
        "residuals": residuals,
        "tolerance": config.tol_eckart,
        "passed": bool(ok and geom_ok),
    }


def _cmd_modes(config, mol, rng):
    basis = build_modes(mol, rng=rng)
    residuals, ok = _residual_block(mol, basis, config.tol_eckart)
    freqs = None if basis.frequencies is None else [float(f) for f in basis.frequencies]
    return {
        "command": "modes",
        "n_modes": basis.n_modes,
        "frequencies": freqs,
        "residuals": residuals,
        "tolerance": config.tol_eckart,
        "passed": bool(ok),
    }


def _frame_scale(mol, cfg):
    return float(
        np.sum(mol.masses * np.linalg.norm(mol.positions, axis=1)
               * np.linalg.norm(cfg.nuclei_positions, axis=1))
    )


def _roundtrip_error(cfg, rebuilt):
    blocks = ("nuclei_positions", "nuclei_momenta", "electron_positions",
              "electron_momenta")
    worst = 0.0
    for name in blocks:
        a, b = getattr(cfg, name), getattr(rebuilt, name)
        if a.size:
            worst = max(worst, float(np.abs(a - b).max()))
    return worst


def _cmd_frame(config, mol, rng):
    if not config.trajectory_path:
        raise SchemaError("the frame command needs --trajectory")
    basis = build_modes(mol, rng=rng)
    frames = []
    ok = True
    for index, cfg in enumerate(load_trajectory(mol, config.trajectory_path)):
        state = analyze(mol, basis, cfg)
        frame = state.frame
        rebuilt = reconstruct(mol, basis, state)
        rt = _roundtrip_error(cfg, rebuilt)
        rel_residual = frame.residual / max(_frame_scale(mol, cfg), 1e-300)
        frame_ok = bool(rel_residual <= config.tol_eckart
                        and rt <= config.tol_roundtrip and not frame.degenerate)
        ok = ok and frame_ok
        frames.append({
            "index": index,
            "orientation": frame.orientation,
            "residual": frame.residual,
            "relative_residual": rel_residual,
            "degenerate": frame.degenerate,
            "com_position": state.com_position,
            "com_momentum": state.com_momentum,
            "mode_amplitudes": state.Q,
            "mode_momenta": state.P,
            "electron_positions": state.q,
            "electron_momenta": state.p,
            "angular_velocity": state.angular_velocity,
            "angular_momentum": state.angular_momentum,
            "roundtrip_error": rt,
            "passed": frame_ok,
        })
    return {
        "command": "frame",
        "n_frames": len(frames),
        "frames": frames,
        "tolerance": {"eckart": config.tol_eckart, "roundtrip": config.tol_roundtrip},
        "passed": bool(ok and frames),
    }


def _cmd_decompose(config, mol, rng):
    if not config.trajectory_path:
        raise SchemaError("the decompose command needs --trajectory")
    basis = build_modes(mol, rng=rng)
    model = build_inertia(mol, basis)
    frames = []
    ok = True
    for index, cfg in enumerate(load_trajectory(mol, config.trajectory_path)):
        state = analyze(mol, basis, cfg)
        rotational, deformation, electronic = decompose_angmom(model, basis, state)
        total = rotational + deformation + electronic
        direct = state.angular_momentum
        residual = float(np.abs(total - direct).max())
        frame_ok = bool(residual <= config.tol_roundtrip)
        ok = ok and frame_ok
        frames.append({
            "index": index,
            "rotational": rotational,
            "deformation": deformation,
            "electronic": electronic,
            "total": total,
            "rest_angular_momentum": direct,
            "residual": residual,
            "passed": frame_ok,
        })
    return {
        "command": "decompose",
        "n_frames": len(frames),
        "frames": frames,
        "tolerance": config.tol_roundtrip,
        "passed": bool(ok and frames),
    }


def _cmd_heisenberg(config, mol, rng):
    hbar = mol.hbar
    tol = config.tol_quad * hbar
    line = LineGrid.make(-config.line_extent, config.line_extent, config.grid_line)
    ball = So3Grid.make(config.grid_theta, config.grid_dirs)
    basis = build_modes(mol, rng=rng)

    rows = []
    vib = [random_line_state(line, rng, hbar=hbar) for _ in range(basis.n_modes)]
    rows += heisenberg_suite(vib, "vibrational", hbar=hbar, tolerance=tol)
    if mol.electron_count:
        elec = [[random_line_state(line, rng, hbar=hbar) for _ in range(3)]
                for _ in range(mol.electron_count)]
        rows += heisenberg_suite(elec, "electronic", hbar=hbar, tolerance=tol)
    rot = [so3_gaussian_state(ball, sigma=0.1)]
    rot += [random_so3_state(ball, rng) for _ in range(2)]
    rows += heisenberg_suite(rot, "rotational", hbar=hbar, tolerance=tol)

    ok = not any(r.satisfied is False for r in rows)
    return {
        "command": "heisenberg",
        "hbar": hbar,
        "tolerance": tol,
        "n_rows": len(rows),
        "rows": [r.to_dict() for r in rows],
        "passed": bool(ok),
    }


def _cmd_commutators(config, mol, rng):
    hbar = mol.hbar
    line = LineGrid.make(-config.line_extent, config.line_extent, config.grid_line)
    ball = So3Grid.make(config.grid_theta, config.grid_dirs)

    line_state = gaussian_line_state(line, center=0.2, sigma=1.0, momentum=0.5 * hbar,
                                     hbar=hbar)
    line_res = line_commutator_residual(line_state, hbar=hbar, order=2)

    psi = so3_gaussian_state(ball, center=(0.1, -0.1, 0.05), sigma=0.45,
                             wave=(0.8, -1.2, 0.4))
    chart = chart_commutator_residuals(psi, hbar=hbar)
    body = body_commutator_residuals(psi, hbar=hbar)
    i0 = equilibrium_inertia(mol)
    angvel = angvel_commutator_check(i0, psi, hbar=hbar)

    checks = {
        "line_canonical": {"residual": line_res, "tolerance": LINE_CANONICAL_TOL,
                           "passed": bool(line_res <= LINE_CANONICAL_TOL)},
        "chart_angmom": {"residual": float(chart.max()), "tolerance": CHART_TOL,
                         "passed": bool(chart.max() <= CHART_TOL)},
        "body_angmom": {"residual": float(body.max()), "tolerance": BODY_TOL,
                        "passed": bool(body.max() <= BODY_TOL)},
        "angular_velocity": {"residual": angvel, "tolerance": ANGVEL_TOL,
                             "passed": bool(angvel <= ANGVEL_TOL)},
    }
    return {
        "command": "commutators",
        "hbar": hbar,
        "boundary_mass": psi.boundary_mass(),
        "checks": checks,
        "passed": bool(all(c["passed"] for c in checks.values())),
    }


_DISPATCH = {
    "validate": _cmd_validate,
    "modes": _cmd_modes,
    "frame": _cmd_frame,
    "decompose": _cmd_decompose,
    "heisenberg": _cmd_heisenberg,
    "commutators": _cmd_commutators,
}

_INPUT_ERRORS = (SchemaError, CollinearGeometryError, FileNotFoundError,
                 IsADirectoryError, PermissionError, ValueError)
_CHECK_ERRORS = (EckartSolveError, EckartViolationError, SingularInertiaError,
                 BoundaryMassError, GridError)


def run(config):
    """Execute one command; returns the process exit status."""
    try:
        config.validate()
    except ValueError as exc:
        print(f"molrest: error: {exc}", file=sys.stderr)
        return 1
    rng = np.random.default_rng(config.seed)
    try:
        mol = _load(config)
        report = _DISPATCH[config.command](config, mol, rng)
    except _CHECK_ERRORS as exc:
        print(f"molrest: check failed: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"molrest: error: {exc}", file=sys.stderr)
        return 1
    _emit(report, config)
    return 0 if report["passed"] else 2


def main(argv=None):
    return run(parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
