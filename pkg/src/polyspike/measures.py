"""Dirac measures and non-uniform splines on [-1, 1], the arccos metric,
and separation checking."""
from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, ValidationError

#: inputs may stick out of [-1, 1] by at most this much before we refuse
CLAMP_TOL = 1e-12

#: locations closer than this are rejected as duplicates
DUPLICATE_TOL = 1e-12

#: slack applied to separation / window comparisons so that boundary-of-
#: guarantee configurations (spacing exactly 4*pi/N) are not rejected by
#: arccos round-off
_SEP_SLACK = 1e-12


def _arccos(x: float) -> float:
    """arccos with a CLAMP_TOL-wide clamp at the endpoints."""
    if x > 1.0:
        if x - 1.0 > CLAMP_TOL:
            raise DomainError(f"{x} is outside [-1, 1]")
        x = 1.0
    elif x < -1.0:
        if -1.0 - x > CLAMP_TOL:
            raise DomainError(f"{x} is outside [-1, 1]")
        x = -1.0
    return math.acos(x)


def cheb_distance(x: float, y: float) -> float:
    """Distance rho(x, y) = |arccos x - arccos y|, in radians."""
    return abs(_arccos(x) - _arccos(y))


@dataclass(frozen=True)
class DiracMeasure:
    """Finite weighted sum of Dirac atoms on [-1, 1].

    Atoms are stored sorted by location; zero-weight atoms are dropped;
    duplicate locations (within DUPLICATE_TOL) are rejected.
    """

    atoms: tuple[tuple[float, complex], ...]

    def __init__(self, atoms):
        pairs = [(float(x), complex(w)) for x, w in atoms if w != 0]
        pairs.sort(key=lambda p: p[0])
        for x, _ in pairs:
            if not -1.0 - CLAMP_TOL <= x <= 1.0 + CLAMP_TOL:
                raise DomainError(f"atom location {x} outside [-1, 1]")
        for (x0, _), (x1, _) in zip(pairs, pairs[1:]):
            if x1 - x0 < DUPLICATE_TOL:
                raise ValidationError(
                    f"duplicate atom locations {x0} and {x1}"
                )
        object.__setattr__(self, "atoms", tuple(pairs))

    @property
    def locations(self) -> np.ndarray:
        return np.array([x for x, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=complex)

    def __len__(self) -> int:
        return len(self.atoms)


def tv_norm(m: DiracMeasure) -> float:
    """Total variation norm: sum of the weight moduli."""
    return float(sum(abs(w) for _, w in m.atoms))


@dataclass(frozen=True)
class SeparationReport:
    satisfied: bool
    threshold: float
    min_pair_distance: float
    domain_violations: tuple[float, ...]
    pair_violations: tuple[tuple[int, int], ...]
    below_theorem_n: bool = False


def check_separation(
    locations, N: int, *, threshold_factor: float = 4.0
) -> SeparationReport:
    """Check the minimal separation condition at degree N.

    Every location must lie in [cos(-pi + 2*pi/N), cos(-2*pi/N)] and every
    pair must satisfy rho >= threshold_factor * pi / N.  N below 128 is
    allowed but flagged (the guarantee only holds for N >= 128).
    """
    locations = [float(x) for x in locations]
    threshold = threshold_factor * math.pi / N
    lo = math.cos(math.pi - 2.0 * math.pi / N)
    hi = math.cos(2.0 * math.pi / N)
    domain_violations = tuple(
        x for x in locations if x < lo - _SEP_SLACK or x > hi + _SEP_SLACK
    )
    t = sorted(_arccos(x) for x in locations)
    min_dist = math.inf
    pair_violations = []
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            d = abs(t[i] - t[j])
            min_dist = min(min_dist, d)
            if d < threshold - _SEP_SLACK:
                pair_violations.append((i, j))
    return SeparationReport(
        satisfied=not domain_violations and not pair_violations,
        threshold=threshold,
        min_pair_distance=min_dist,
        domain_violations=domain_violations,
        pair_violations=tuple(pair_violations),
        below_theorem_n=N < 128,
    )


def _polyval(coeffs, x):
    """Evaluate a polynomial given ascending coefficients."""
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs))


def _polyder(coeffs):
    c = np.polynomial.polynomial.polyder(np.asarray(coeffs, dtype=complex))
    return tuple(c) if len(c) else (0j,)


@dataclass(frozen=True)
class Spline:
    """Piecewise polynomial of degree r on [-1, 1] with C^{r-1} knots.

    Pieces are stored as ascending monomial coefficients in the global
    variable x (one tuple of r+1 coefficients per interval of the partition
    {-1, x_1, ..., x_M, 1}); the knot x_m belongs to the piece on its right,
    and x = 1 belongs to the last piece.  Boundary holds f^(j)(-1), f^(j)(1)
    for j = 0..r.
    """

    degree_r: int
    knots: tuple[float, ...]
    pieces: tuple[tuple[complex, ...], ...]
    boundary_left: tuple[complex, ...] = field(default=())
    boundary_right: tuple[complex, ...] = field(default=())
    continuity_tol: float = 1e-9

    def __init__(self, degree_r, knots, pieces,
                 boundary_left=None, boundary_right=None,
                 continuity_tol=1e-9):
        degree_r = int(degree_r)
        if degree_r < 0:
            raise ValidationError("spline degree must be nonnegative")
        knots = tuple(float(x) for x in knots)
        if any(b <= a for a, b in zip(knots, knots[1:])):
            raise ValidationError("knots must be strictly increasing")
        if knots and (knots[0] <= -1.0 or knots[-1] >= 1.0):
            raise ValidationError("knots must lie in (-1, 1)")
        pieces = tuple(
            tuple(complex(c) for c in p) + (0j,) * (degree_r + 1 - len(p))
            for p in pieces
        )
        if any(len(p) != degree_r + 1 for p in pieces):
            raise ValidationError("each piece needs at most r+1 coefficients")
        if len(pieces) != len(knots) + 1:
            raise ValidationError(
                f"{len(knots)} knots require {len(knots) + 1} pieces, "
                f"got {len(pieces)}"
            )
        scale = max(
            (abs(c) for p in pieces for c in p), default=0.0
        )
        tol = continuity_tol * max(scale, 1.0)
        # C^{r-1} continuity at every knot
        for i, xk in enumerate(knots):
            left = np.asarray(pieces[i], dtype=complex)
            right = np.asarray(pieces[i + 1], dtype=complex)
            for _ in range(degree_r):  # orders 0 .. r-1
                lv = _polyval(left, xk)
                rv = _polyval(right, xk)
                if abs(lv - rv) > tol:
                    raise ValidationError(
                        f"pieces disagree at knot {xk}: {lv} vs {rv}"
                    )
                left = np.polynomial.polynomial.polyder(left)
                right = np.polynomial.polynomial.polyder(right)

        derived_left = _endpoint_derivatives(pieces[0], -1.0, degree_r)
        derived_right = _endpoint_derivatives(pieces[-1], 1.0, degree_r)
        if boundary_left is None:
            boundary_left = derived_left
        elif any(abs(a - b) > tol
                 for a, b in zip(boundary_left, derived_left)):
            raise ValidationError("boundary_left disagrees with first piece")
        if boundary_right is None:
            boundary_right = derived_right
        elif any(abs(a - b) > tol
                 for a, b in zip(boundary_right, derived_right)):
            raise ValidationError("boundary_right disagrees with last piece")
        if len(boundary_left) != degree_r + 1 or len(boundary_right) != degree_r + 1:
            raise ValidationError("boundary sequences must have length r+1")

        object.__setattr__(self, "degree_r", degree_r)
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "boundary_left",
                           tuple(complex(v) for v in boundary_left))
        object.__setattr__(self, "boundary_right",
                           tuple(complex(v) for v in boundary_right))
        object.__setattr__(self, "continuity_tol", float(continuity_tol))


def _endpoint_derivatives(coeffs, x, r):
    """(f(x), f'(x), ..., f^(r)(x)) for ascending monomial coeffs."""
    c = np.asarray(coeffs, dtype=complex)
    out = []
    for _ in range(r + 1):
        out.append(complex(_polyval(c, x)))
        c = np.polynomial.polynomial.polyder(c)
    return tuple(out)


def eval_spline(s: Spline, x: float) -> complex:
    """Evaluate the piece whose half-open interval contains x."""
    if not -1.0 - CLAMP_TOL <= x <= 1.0 + CLAMP_TOL:
        raise DomainError(f"{x} is outside [-1, 1]")
    idx = bisect_right(s.knots, x)
    return complex(_polyval(s.pieces[idx], x))


def spline_distributional_derivative(s: Spline):
    """Distributional derivative: a degree r-1 spline for r >= 1, the Dirac
    train of jumps at the knots for r = 0."""
    if s.degree_r == 0:
        jumps = []
        for i, xk in enumerate(s.knots):
            jumps.append((xk, s.pieces[i + 1][0] - s.pieces[i][0]))
        return DiracMeasure(jumps)
    return Spline(
        s.degree_r - 1,
        s.knots,
        tuple(_polyder(p) for p in s.pieces),
        boundary_left=s.boundary_left[1:],
        boundary_right=s.boundary_right[1:],
        continuity_tol=s.continuity_tol,
    )
