"""Command-line surface: synthesize instances, project to moments, run
recoveries, build/verify certificates, and run phase-transition sweeps."""
from __future__ import annotations

import json
import math
import sys
import time

import click
import numpy as np

from . import io
from .bases import BasisSpec, MomentVector, change_of_basis, moments_of_dirac, moments_of_spline
from .bivariate import (
    build_certificate_2d,
    check_separation_2d,
    moments_2d,
    recover_spikes_2d,
    verify_certificate_2d,
)
from .certificates import build_certificate, eval_algebraic, verify_certificate
from .exceptions import (
    CertificateConstructionError,
    PolyspikeError,
    SeparationViolationError,
    SolverError,
    ValidationError,
)
from .measures import check_separation
from .solvers import SolverOptions, recover_spikes
from .splines import consistency_check, recover_spline
from .sweeps import phase_sweep
from .synth import random_spikes, random_spikes_2d, random_spline

EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_json(path: str) -> dict:
    try:
        return io.load_json(path)
    except json.JSONDecodeError as exc:
        _fail(EXIT_IO, f"{path}: parse error at line {exc.lineno}, "
                       f"column {exc.colno}: {exc.msg}")
    except OSError as exc:
        _fail(EXIT_IO, str(exc))


def _report_dict(report) -> dict:
    min_dist = report.min_pair_distance
    return {
        "satisfied": report.satisfied,
        "threshold": report.threshold,
        "min_pair_distance": None if math.isinf(min_dist) else min_dist,
        "domain_violations": list(report.domain_violations),
        "pair_violations": [list(p) for p in report.pair_violations],
        "below_theorem_n": report.below_theorem_n,
    }


def _certificate_report_dict(report) -> dict:
    return {
        "interpolation_residual": report.interpolation_residual,
        "off_support_max": report.off_support_max,
        "near_knot_ok": report.near_knot_ok,
        "grid_size": report.grid_size,
        "exclusion_radius": report.exclusion_radius,
        "passed": report.passed,
    }


@click.group()
def main():
    """Recovery of spike trains and non-uniform splines from polynomial
    moments."""


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--kind", type=click.Choice(io.KINDS), default="spikes")
@click.option("--m", "num_atoms", type=int, required=True,
              help="Number of atoms / knots.")
@click.option("--n", "degree", type=int, required=True,
              help="Polynomial degree N.")
@click.option("--r", "spline_degree", type=int, default=1,
              help="Spline degree (kind=spline only).")
@click.option("--min-sep-factor", type=float, default=4.0)
@click.option("--snap-grid-size", type=int, default=None,
              help="Snap locations to the arccos-uniform LP grid of this "
                   "size, so LP recovery can be exact.")
@click.option("--basis", type=click.Choice(["monomial", "chebyshev", "legendre"]),
              default="chebyshev")
@click.option("--output", type=click.Path(), required=True,
              help="Problem file path.")
@click.option("--truth-output", type=click.Path(), required=True,
              help="Ground-truth file path.")
def gen(seed, kind, num_atoms, degree, spline_degree, min_sep_factor,
        snap_grid_size, basis, output, truth_output):
    """Generate a separated synthetic instance plus its ground truth."""
    try:
        spec = BasisSpec(basis, degree)
        if kind == "spikes":
            truth = random_spikes(seed, num_atoms, degree, min_sep_factor,
                                  snap_grid_size=snap_grid_size)
            y = moments_of_dirac(truth, spec)
            problem = io.problem_to_dict(kind, basis, degree, y.values)
            truth_dict = io.measure_to_dict(truth)
        elif kind == "spline":
            truth = random_spline(seed, num_atoms, degree, spline_degree,
                                  min_sep_factor, complex_valued=False,
                                  snap_grid_size=snap_grid_size)
            y = moments_of_spline(truth, spec)
            problem = io.problem_to_dict(
                kind, basis, degree, y.values,
                spline={
                    "degree_r": truth.degree_r,
                    "boundary_left": [io._c(v) for v in truth.boundary_left],
                    "boundary_right": [io._c(v) for v in truth.boundary_right],
                },
            )
            truth_dict = io.spline_to_dict(truth)
        else:
            truth = random_spikes_2d(seed, num_atoms, degree, min_sep_factor,
                                     snap_grid_size=snap_grid_size)
            Y = moments_2d(truth, degree)
            problem = io.problem_to_dict(kind, "chebyshev", degree, Y)
            truth_dict = io.measure2d_to_dict(truth)
    except PolyspikeError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if basis == "monomial" and degree > 64:
        click.echo("warning: monomial basis beyond N = 64 loses accuracy "
                   "in basis conversion", err=True)
    io.dump_json(problem, output)
    io.dump_json(truth_dict, truth_output)
    click.echo(f"wrote {output} and {truth_output}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True),
              required=True, help="Truth file (atoms or spline).")
@click.option("--basis", type=click.Choice(["monomial", "chebyshev", "legendre"]),
              default="chebyshev")
@click.option("--n", "degree", type=int, required=True)
@click.option("--output", type=click.Path(), required=True)
def project(input_path, basis, degree, output):
    """Forward direction: project a truth file onto V_N (emit a problem)."""
    data = _load_json(input_path)
    try:
        truth = io.truth_from_dict(data)
        spec = BasisSpec(basis, degree)
        kind = data["kind"]
        if kind == "spikes":
            problem = io.problem_to_dict(
                kind, basis, degree, moments_of_dirac(truth, spec).values
            )
        elif kind == "spline":
            problem = io.problem_to_dict(
                kind, basis, degree, moments_of_spline(truth, spec).values,
                spline={
                    "degree_r": truth.degree_r,
                    "boundary_left": [io._c(v) for v in truth.boundary_left],
                    "boundary_right": [io._c(v) for v in truth.boundary_right],
                },
            )
        else:
            problem = io.problem_to_dict(
                kind, "chebyshev", degree, moments_2d(truth, degree)
            )
    except (PolyspikeError, KeyError) as exc:
        _fail(EXIT_VALIDATION, f"invalid truth file: {exc}")
    if basis == "monomial" and degree > 64:
        click.echo("warning: monomial basis beyond N = 64 loses accuracy "
                   "in basis conversion", err=True)
    io.dump_json(problem, output)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True),
              required=True)
@click.option("--output", type=click.Path(), required=True)
@click.option("--method", type=click.Choice(["pencil", "lp"]),
              default="pencil")
@click.option("--grid-size", type=int, default=None)
@click.option("--tol", type=float, default=1e-8,
              help="Coefficient drop tolerance.")
@click.option("--nonnegative", is_flag=True, default=False)
def recover(input_path, output, method, grid_size, tol, nonnegative):
    """Recover spikes or a spline from a problem file."""
    data = _load_json(input_path)
    try:
        parsed = io.parse_problem(data)
    except PolyspikeError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    opts = SolverOptions(method=method, lp_grid_size=grid_size,
                         lp_nonnegative=nonnegative, coefficient_tol=tol)
    warnings = []
    if parsed["N"] < 128:
        warnings.append("N below the guaranteed regime (N >= 128)")
    if data["basis"] == "monomial" and parsed["N"] > 64:
        warnings.append("monomial basis beyond N = 64 loses accuracy")
    kind = parsed["kind"]
    start = time.perf_counter()
    try:
        if kind == "spikes":
            y = parsed["moment_vector"]
            measure = recover_spikes(y, opts)
            forward = moments_of_dirac(measure, y.basis).asarray()
            residuals = {
                "forward_moments": float(
                    np.linalg.norm(forward - y.asarray())
                )
            }
            solution = io.solution_to_dict(
                kind,
                atoms=[{"location": x, "weight": io._c(w)}
                       for x, w in measure.atoms],
                residuals=residuals,
            )
        elif kind == "spline":
            problem = parsed["spline_problem"]
            spline = recover_spline(problem, opts)
            report = consistency_check(spline, problem)
            solution = io.solution_to_dict(
                kind, spline=spline,
                residuals={
                    "forward_moments": report.moment_residual,
                    "boundary_left": list(report.boundary_left_residuals),
                    "boundary_right": list(report.boundary_right_residuals),
                },
            )
        else:
            Y = parsed["moment_matrix"]
            measure = recover_spikes_2d(Y, opts)
            forward = moments_2d(measure, parsed["N"])
            solution = io.solution_to_dict(
                kind,
                atoms=[{"location": list(loc), "weight": w}
                       for loc, w in measure.atoms],
                residuals={"forward_moments": float(np.linalg.norm(forward - Y))},
            )
    except (ValidationError,) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except (SolverError, SeparationViolationError,
            CertificateConstructionError) as exc:
        failure = io.solution_to_dict(
            kind, error={"type": type(exc).__name__, "message": str(exc)},
            warnings=warnings,
        )
        io.dump_json(failure, output)
        _fail(EXIT_SOLVER, str(exc))
    solution["timing_ms"] = (time.perf_counter() - start) * 1000.0
    solution["warnings"] = warnings
    solution["options"] = {
        "method": method, "grid_size": grid_size, "tol": tol,
        "nonnegative": nonnegative,
    }
    io.dump_json(solution, output)
    click.echo(f"wrote {output}")


@main.command()
@click.option("--input", "input_path", type=click.Path(exists=True),
              default=None, help="JSON with 'knots' and optional 'values'.")
@click.option("--knots", "knots_arg", type=str, default=None,
              help="Comma-separated knot locations (1D).")
@click.option("--n", "degree", type=int, required=True)
@click.option("--grid-points-per-degree", type=int, default=16)
@click.option("--exclusion-radius", type=float, default=None)
@click.option("--force", is_flag=True, default=False,
              help="Attempt construction even if separation fails.")
@click.option("--output", type=click.Path(), required=True)
@click.option("--samples-csv", type=click.Path(), default=None,
              help="Dump certificate samples (x,t,re P,im P,|P|).")
def certify(input_path, knots_arg, degree, grid_points_per_degree,
            exclusion_radius, force, output, samples_csv):
    """Build and verify a dual certificate for a knot set."""
    if (input_path is None) == (knots_arg is None):
        _fail(EXIT_VALIDATION, "provide exactly one of --input or --knots")
    if input_path is not None:
        data = _load_json(input_path)
        knots = data.get("knots", [])
        values = data.get("values")
    else:
        knots = [float(v) for v in knots_arg.split(",")]
        values = None
    two_d = bool(knots) and isinstance(knots[0], (list, tuple))
    if values is None:
        values = [1.0] * len(knots)
    values = [io._from_c(v) for v in values]
    if any(abs(abs(v) - 1.0) > 1e-9 for v in values):
        _fail(EXIT_VALIDATION, "interpolation values must be unit modulus")

    try:
        if two_d:
            signs = [v.real for v in values]
            sep = check_separation_2d(knots, degree)
            if not sep.satisfied and not force:
                io.dump_json({"separation": _report_dict(sep)}, output)
                click.echo("separation violated; no construction attempted")
                return
            cert = build_certificate_2d(knots, signs, degree, check=False)
            report = verify_certificate_2d(
                cert, knots, signs,
                grid_points_per_degree=max(grid_points_per_degree, 4),
                exclusion_radius=exclusion_radius,
            )
            warnings = list(cert.warnings)
        else:
            sep = check_separation(knots, degree)
            if not sep.satisfied and not force:
                io.dump_json({"separation": _report_dict(sep)}, output)
                click.echo("separation violated; no construction attempted")
                return
            cert = build_certificate(knots, values, degree, check=False)
            report = verify_certificate(
                cert, knots, values,
                grid_points_per_degree=grid_points_per_degree,
                exclusion_radius=exclusion_radius,
            )
            warnings = list(cert.warnings)
            if samples_csv is not None:
                ts = np.linspace(0.0, math.pi, 4 * max(cert.degree, 1) + 1)
                xs = np.cos(ts)
                ps = eval_algebraic(cert, xs)
                with open(samples_csv, "w") as fh:
                    fh.write("x,t,re P,im P,|P|\n")
                    for x, t, p in zip(xs, ts, ps):
                        fh.write(f"{x!r},{t!r},{p.real!r},{p.imag!r},"
                                 f"{abs(p)!r}\n")
    except (ValidationError, SeparationViolationError) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    except CertificateConstructionError as exc:
        _fail(EXIT_SOLVER, str(exc))

    io.dump_json(
        {
            "separation": _report_dict(sep),
            "certificate": _certificate_report_dict(report),
            "warnings": warnings,
        },
        output,
    )
    click.echo(f"passed: {report.passed}")


@main.command()
@click.option("--trials", type=int, default=50)
@click.option("--sep-min-factor", type=float, default=1.0)
@click.option("--sep-max-factor", type=float, default=5.0)
@click.option("--steps", type=int, default=5)
@click.option("--n", "degree", type=int, default=128)
@click.option("--m", "num_atoms", type=int, default=10)
@click.option("--master-seed", type=int, default=0)
@click.option("--parallelism", type=int, default=1)
@click.option("--nonnegative", is_flag=True, default=False,
              help="Nonnegative weights and nonnegative-mode LP.")
@click.option("--timing/--no-timing", default=True,
              help="--no-timing zeroes the runtime column so the CSV is "
                   "reproducible byte-for-byte.")
@click.option("--output", type=click.Path(), default=None)
def phase(trials, sep_min_factor, sep_max_factor, steps, degree, num_atoms,
          master_seed, parallelism, nonnegative, timing, output):
    """Sweep separation factors and record exact-recovery success rates."""
    try:
        csv_text = phase_sweep(
            trials, sep_min_factor, sep_max_factor, steps, degree,
            num_atoms, master_seed, parallelism=parallelism, timing=timing,
            nonnegative=nonnegative,
        )
    except (PolyspikeError, ValueError) as exc:
        _fail(EXIT_VALIDATION, str(exc))
    if output is None:
        click.echo(csv_text, nl=False)
    else:
        with open(output, "w") as fh:
            fh.write(csv_text)
        click.echo(f"wrote {output}")


if __name__ == "__main__":
    main()
