"""Polynomial bases of V_N, change of basis, derivative expansion matrices,
and moment computation for measures and splines."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre as L
from numpy.polynomial import polynomial as P

from .exceptions import ValidationError
from .measures import DiracMeasure, Spline

KINDS = ("monomial", "chebyshev", "legendre")


@dataclass(frozen=True)
class BasisSpec:
    kind: str
    N: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown basis kind {self.kind!r}")
        if self.N < 0:
            raise ValidationError("basis degree must be nonnegative")


@dataclass(frozen=True)
class MomentVector:
    basis: BasisSpec
    values: tuple[complex, ...]

    def __init__(self, basis, values):
        values = tuple(complex(v) for v in values)
        if len(values) != basis.N + 1:
            raise ValidationError(
                f"expected {basis.N + 1} moments, got {len(values)}"
            )
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "values", values)

    def asarray(self) -> np.ndarray:
        return np.array(self.values, dtype=complex)


@dataclass(frozen=True)
class DerivativeMatrix:
    basis: BasisSpec
    entries: np.ndarray  # (N+1) x (N+1), row k expands P'_k


def basis_matrix(basis: BasisSpec, x) -> np.ndarray:
    """Values P_k(x), returned as an array of shape (len(x), N+1).

    Chebyshev and Legendre use the stable three-term recurrences; the
    monomial basis uses plain powers.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = basis.N + 1
    out = np.empty((x.size, n))
    out[:, 0] = 1.0
    if n == 1:
        return out
    out[:, 1] = x
    if basis.kind == "monomial":
        for k in range(2, n):
            out[:, k] = out[:, k - 1] * x
    elif basis.kind == "chebyshev":
        for k in range(2, n):
            out[:, k] = 2.0 * x * out[:, k - 1] - out[:, k - 2]
    else:  # legendre
        for k in range(2, n):
            out[:, k] = ((2 * k - 1) * x * out[:, k - 1]
                         - (k - 1) * out[:, k - 2]) / k
    return out


def eval_basis(basis: BasisSpec, k: int, x: float) -> float:
    """P_k(x) for a single index k."""
    if not 0 <= k <= basis.N:
        raise IndexError(f"basis index {k} out of range 0..{basis.N}")
    return float(basis_matrix(basis, [x])[0, k])


_DER = {"monomial": P.polyder, "chebyshev": C.chebder, "legendre": L.legder}

def _cheb2leg(c):
    # via series arithmetic in the target family (stable; avoids the
    # ill-conditioned detour through monomials)
    return np.polynomial.Chebyshev(c).convert(kind=np.polynomial.Legendre).coef


def _leg2cheb(c):
    return np.polynomial.Legendre(c).convert(kind=np.polynomial.Chebyshev).coef


# converters from a coefficient vector in KEY[0] to one in KEY[1]
_CONVERT = {
    ("monomial", "chebyshev"): C.poly2cheb,
    ("chebyshev", "monomial"): C.cheb2poly,
    ("monomial", "legendre"): L.poly2leg,
    ("legendre", "monomial"): L.leg2poly,
    ("chebyshev", "legendre"): _cheb2leg,
    ("legendre", "chebyshev"): _leg2cheb,
}


@lru_cache(maxsize=None)
def derivative_matrix(basis: BasisSpec) -> DerivativeMatrix:
    """Matrix alpha with row k expanding P'_k in the same basis."""
    n = basis.N + 1
    der = _DER[basis.kind]
    entries = np.zeros((n, n))
    for k in range(1, n):
        e = np.zeros(k + 1)
        e[k] = 1.0
        d = der(e)
        entries[k, : len(d)] = d
    return DerivativeMatrix(basis, entries)


@lru_cache(maxsize=None)
def _conversion_matrix(source: str, target: str, N: int) -> np.ndarray:
    """Matrix C with row j expanding target_P_j in the source basis, so that
    y_target = C @ y_source."""
    n = N + 1
    if source == target:
        return np.eye(n)
    convert = _CONVERT[(target, source)]
    mat = np.zeros((n, n))
    for j in range(n):
        e = np.zeros(j + 1)
        e[j] = 1.0
        row = convert(e)
        mat[j, : len(row)] = row
    return mat


def change_of_basis(y: MomentVector, target: BasisSpec) -> MomentVector:
    """Moments of the same functional against the target basis."""
    if target.N != y.basis.N:
        raise ValidationError(
            f"degree mismatch: {y.basis.N} vs {target.N}"
        )
    if target.kind == y.basis.kind:
        return MomentVector(target, y.values)
    mat = _conversion_matrix(y.basis.kind, target.kind, y.basis.N)
    return MomentVector(target, mat @ y.asarray())


def moments_of_dirac(m: DiracMeasure, basis: BasisSpec) -> MomentVector:
    """y_k = sum_m c_m P_k(x_m)."""
    if len(m) == 0:
        return MomentVector(basis, np.zeros(basis.N + 1, dtype=complex))
    vals = basis_matrix(basis, m.locations)  # (M, N+1)
    return MomentVector(basis, m.weights @ vals)


def moments_of_spline(s: Spline, basis: BasisSpec) -> MomentVector:
    """y_k = integral of s(x) P_k(x) over [-1, 1].

    Piecewise Gauss-Legendre with ceil((N + r + 1)/2) + 1 nodes per piece,
    exact for the polynomial integrands that occur.
    """
    nodes = -(-(basis.N + s.degree_r + 1) // 2) + 1
    g, w = np.polynomial.legendre.leggauss(nodes)
    breaks = (-1.0,) + s.knots + (1.0,)
    y = np.zeros(basis.N + 1, dtype=complex)
    for i, coeffs in enumerate(s.pieces):
        a, b = breaks[i], breaks[i + 1]
        xs = 0.5 * (b - a) * g + 0.5 * (a + b)
        fvals = np.polynomial.polynomial.polyval(
            xs, np.asarray(coeffs, dtype=complex)
        )
        pv = basis_matrix(basis, xs)  # (nodes, N+1)
        y += 0.5 * (b - a) * (pv.T @ (w * fvals))
    return MomentVector(basis, y)
