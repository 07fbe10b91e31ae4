"""Deterministic synthetic instance generation for tests, the CLI, and
phase-transition sweeps."""
from __future__ import annotations

import math

import numpy as np

from .bivariate import DiracMeasure2D
from .exceptions import GenerationError
from .measures import DiracMeasure, Spline
from .splines import integrate_back


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed))


def separated_t_knots(rng: np.random.Generator, M: int, N: int,
                      min_sep_factor: float) -> np.ndarray:
    """M points in [2 pi/N, pi - 2 pi/N] with pairwise gaps of at least
    min_sep_factor * pi / N, drawn uniformly then greedily spaced."""
    gap = min_sep_factor * math.pi / N
    window = math.pi - 4.0 * math.pi / N
    if M * gap > window:
        raise GenerationError(
            f"infeasible: M * min_sep_factor * pi / N = {M * gap:.6f} "
            f"exceeds pi - 4 pi / N = {window:.6f}"
        )
    slack = window - (M - 1) * gap
    u = np.sort(rng.uniform(0.0, slack, size=M))
    return 2.0 * math.pi / N + u + gap * np.arange(M)


def _snap(t: np.ndarray, grid_size: int) -> np.ndarray:
    """Snap t values to the nearest node of the arccos-uniform LP grid."""
    cell = math.pi / (grid_size - 1)
    return np.round(t / cell) * cell


def random_spikes(seed, M: int, N: int, min_sep_factor: float,
                  weights: str = "complex_unit",
                  snap_grid_size: int | None = None) -> DiracMeasure:
    """Random separated spike train; weights are unit-modulus complex,
    signed real in [0.5, 2] magnitude, or nonnegative in [0.5, 2]."""
    rng = _rng(seed)
    t = separated_t_knots(rng, M, N, min_sep_factor)
    if snap_grid_size is not None:
        t = _snap(t, snap_grid_size)
    if weights == "complex_unit":
        w = np.exp(2j * math.pi * rng.uniform(size=M))
    elif weights == "signed_real":
        w = rng.uniform(0.5, 2.0, size=M) * rng.choice([-1.0, 1.0], size=M)
    elif weights == "nonnegative":
        w = rng.uniform(0.5, 2.0, size=M)
    else:
        raise ValueError(f"unknown weight mode {weights!r}")
    return DiracMeasure(list(zip(np.cos(t), w)))


def random_spline(seed, M: int, N: int, degree_r: int,
                  min_sep_factor: float, complex_valued: bool = True,
                  snap_grid_size: int | None = None) -> Spline:
    """Random degree-r spline with separated knots, built by integrating a
    random jump train of its r-th derivative from random left boundary
    values (so it is C^{r-1} by construction)."""
    rng = _rng(seed)
    t = separated_t_knots(rng, M, N, min_sep_factor)
    if snap_grid_size is not None:
        t = _snap(t, snap_grid_size)
    mags = rng.uniform(0.5, 2.0, size=M)
    if complex_valued:
        jumps = mags * np.exp(2j * math.pi * rng.uniform(size=M))
        boundary = rng.normal(size=degree_r + 1) + 1j * rng.normal(
            size=degree_r + 1
        )
    else:
        jumps = mags * rng.choice([-1.0, 1.0], size=M)
        boundary = rng.normal(size=degree_r + 1)
    train = DiracMeasure(list(zip(np.cos(t), jumps)))
    return integrate_back(train, boundary, degree_r)


def random_spikes_2d(seed, M: int, N: int, min_sep_factor: float,
                     max_tries: int = 10_000,
                     snap_grid_size: int | None = None) -> DiracMeasure2D:
    """Random separated 2D spike train (componentwise-max metric), by
    rejection sampling in the t-square."""
    rng = _rng(seed)
    gap = min_sep_factor * math.pi / N
    lo, hi = 2.0 * math.pi / N, math.pi - 2.0 * math.pi / N
    pts: list[tuple[float, float]] = []
    tries = 0
    while len(pts) < M:
        tries += 1
        if tries > max_tries:
            raise GenerationError(
                f"could not place {M} points with separation "
                f"{min_sep_factor} * pi / N after {max_tries} tries"
            )
        cand = (rng.uniform(lo, hi), rng.uniform(lo, hi))
        if snap_grid_size is not None:
            cand = tuple(_snap(np.array(cand), snap_grid_size))
        if all(max(abs(cand[0] - p[0]), abs(cand[1] - p[1])) >= gap
               for p in pts):
            pts.append(cand)
    w = rng.uniform(0.5, 2.0, size=M) * rng.choice([-1.0, 1.0], size=M)
    atoms = [((math.cos(t1), math.cos(t2)), wi)
             for (t1, t2), wi in zip(pts, w)]
    return DiracMeasure2D(atoms)
