"""Dual interpolating polynomials: build a degree-N algebraic polynomial that
takes prescribed unit-modulus values at separated knots and stays strictly
below 1 in modulus elsewhere, then verify those properties numerically."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar

from .exceptions import (
    CertificateConstructionError,
    ReflectionCollisionError,
    SeparationViolationError,
    ValidationError,
)
from .measures import check_separation

#: default residual tolerance for the interpolation conditions
INTERP_TOL = 1e-9
#: default slack allowed on |P| <= 1 inside the exclusion radius
EVAL_TOL = 1e-9
#: condition-number threshold above which a construction warning is attached
COND_WARN = 1e12


@dataclass(frozen=True)
class TrigPoly:
    """Trigonometric polynomial sum a_k e^{ikt}, k = -degree..degree."""

    degree: int
    coeffs: np.ndarray  # length 2*degree + 1, index k + degree
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if len(self.coeffs) != 2 * self.degree + 1:
            raise ValidationError("coefficient length must be 2*degree + 1")


@dataclass(frozen=True)
class EvenTrigPoly:
    """Even trigonometric polynomial sum beta_k cos(kt)."""

    degree: int
    cos_coeffs: np.ndarray  # length degree + 1
    warnings: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class AlgebraicPoly:
    """Algebraic polynomial in Chebyshev form, P(x) = sum beta_k T_k(x)."""

    degree: int
    cheb_coeffs: np.ndarray  # length degree + 1
    warnings: tuple[str, ...] = field(default=(), compare=False)


@dataclass(frozen=True)
class CertificateReport:
    interpolation_residual: float
    off_support_max: float
    near_knot_ok: bool
    grid_size: int
    exclusion_radius: float
    passed: bool


def eval_trig(q: TrigPoly, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(-q.degree, q.degree + 1)
    return np.exp(1j * np.outer(t, k)) @ q.coeffs


def eval_even_trig(q: EvenTrigPoly, t) -> np.ndarray:
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = np.arange(q.degree + 1)
    return np.cos(np.outer(t, k)) @ q.cos_coeffs


def eval_algebraic(p: AlgebraicPoly, x) -> np.ndarray:
    return np.polynomial.chebyshev.chebval(
        np.asarray(x, dtype=float), p.cheb_coeffs
    )


def reflect_knots(t_tilde, u_tilde):
    """Mirror a point set in [-pi, 0] (and its values) about 0.

    Returns (t, u) of length 2M with t strictly increasing; u is palindromic
    about the midpoint.  Points exactly at 0 or -pi would coincide with
    their reflections and are rejected.
    """
    t_tilde = [float(t) for t in t_tilde]
    u_tilde = [complex(u) for u in u_tilde]
    if len(t_tilde) != len(u_tilde) or not t_tilde:
        raise ValidationError("need equally many knots and values, M >= 1")
    if any(b <= a for a, b in zip(t_tilde, t_tilde[1:])):
        raise ValidationError("t_tilde must be strictly increasing")
    if t_tilde[0] < -math.pi or t_tilde[-1] > 0.0:
        raise ValidationError("t_tilde must lie within [-pi, 0]")
    for t in t_tilde:
        if t == 0.0 or t == -math.pi:
            raise ReflectionCollisionError(
                f"point {t} coincides with its own reflection"
            )
    t = t_tilde + [-tt for tt in reversed(t_tilde)]
    u = u_tilde + list(reversed(u_tilde))
    return np.array(t), np.array(u)


@lru_cache(maxsize=None)
def _kernel_coeffs(m: int) -> np.ndarray:
    """Exponential coefficients of the fourth-power Fejer-type kernel
    K(t) = [sin(m t/2) / (m sin(t/2))]^4, symmetric, degree 2(m-1),
    normalized so K(0) = 1."""
    tri = (m - np.abs(np.arange(-(m - 1), m))) / m**2
    return np.convolve(tri, tri)


def _kernel_eval(m: int, t, order: int = 0) -> np.ndarray:
    """K, K' or K'' evaluated elementwise (order = 0, 1, 2)."""
    kappa = _kernel_coeffs(m)
    d = 2 * (m - 1)
    k = np.arange(1, d + 1)
    pos = kappa[d + 1:]
    t = np.asarray(t, dtype=float)
    arg = t[..., None] * k
    if order == 0:
        return kappa[d] + 2.0 * np.cos(arg) @ pos
    if order == 1:
        return -2.0 * np.sin(arg) @ (k * pos)
    return -2.0 * np.cos(arg) @ (k * k * pos)


def kernel_degree(N: int) -> tuple[int, int]:
    """Kernel parameter m and resulting trigonometric degree 2(m-1) <= N."""
    m = N // 2 + 1
    return m, 2 * (m - 1)


def build_trig_certificate(t, u, N: int) -> TrigPoly:
    """Interpolate Q(t_m) = u_m, Q'(t_m) = 0 with translated Jackson-type
    kernels K(. - t_m) and their derivatives, expanded into Fourier
    coefficients of degree <= N."""
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=complex)
    if t.size != u.size or t.size == 0:
        raise ValidationError("need equally many knots and values")
    m, deg = kernel_degree(N)
    warnings = []
    if deg != N:
        warnings.append(
            f"degree rounded down to {deg} (N = {N} is odd); "
            "the certificate still lies in V_N"
        )
    diff = t[:, None] - t[None, :]
    K0 = _kernel_eval(m, diff, 0)
    K1 = _kernel_eval(m, diff, 1)
    K2 = _kernel_eval(m, diff, 2)
    A = np.block([[K0, K1], [K1, K2]])
    scale = np.abs(A).max(axis=0)
    scale[scale == 0] = 1.0
    A_eq = A / scale
    cond = np.linalg.cond(A_eq)
    if not np.isfinite(cond):
        raise CertificateConstructionError("interpolation system is singular")
    if cond > COND_WARN:
        warnings.append(f"interpolation system condition estimate {cond:.3e}")
    rhs = np.concatenate([u, np.zeros_like(u)])
    try:
        sol = scipy.linalg.solve(A_eq, rhs)
    except scipy.linalg.LinAlgError as exc:
        raise CertificateConstructionError(
            "interpolation system is singular"
        ) from exc
    sol = sol / scale
    a, b = sol[: t.size], sol[t.size:]

    kappa = _kernel_coeffs(m)
    k = np.arange(-deg, deg + 1)
    E = np.exp(-1j * np.outer(k, t))  # (2*deg+1, P)
    coeffs = kappa * (E @ a + 1j * k * (E @ b))
    return TrigPoly(deg, coeffs, tuple(warnings))


def symmetrize(q: TrigPoly) -> EvenTrigPoly:
    """Even part (Q(t) + Q(-t)) / 2 in cosine form."""
    d = q.degree
    beta = np.empty(d + 1, dtype=complex)
    beta[0] = q.coeffs[d]
    beta[1:] = q.coeffs[d + 1:] + q.coeffs[d - 1::-1]
    return EvenTrigPoly(d, beta, q.warnings)


def to_algebraic(q: EvenTrigPoly) -> AlgebraicPoly:
    """P(x) = Q(arccos x); Chebyshev coefficients equal cosine coefficients."""
    return AlgebraicPoly(q.degree, np.array(q.cos_coeffs), q.warnings)


def build_certificate(knots, u_values, N: int, *,
                      check: bool = True) -> AlgebraicPoly:
    """Full pipeline: arccos map, reflection, kernel interpolation,
    symmetrization, Chebyshev recast."""
    knots = np.sort(np.asarray(knots, dtype=float))
    u_values = np.asarray(u_values, dtype=complex)
    if check:
        report = check_separation(knots, N)
        if not report.satisfied:
            raise SeparationViolationError(
                f"knots violate the separation condition: "
                f"domain {report.domain_violations}, "
                f"pairs {report.pair_violations}"
            )
    t_tilde = -np.arccos(knots)  # increasing in (-pi, 0)
    order = np.argsort(t_tilde)
    t, u = reflect_knots(t_tilde[order], u_values[order])
    return to_algebraic(symmetrize(build_trig_certificate(t, u, N)))


def verify_certificate(p: AlgebraicPoly, knots, u_values,
                       grid_points_per_degree: int = 16,
                       exclusion_radius: float | None = None,
                       interp_tol: float = INTERP_TOL,
                       eval_tol: float = EVAL_TOL) -> CertificateReport:
    """Grid scan (uniform in t = arccos x) plus golden-section refinement of
    the local maxima of |P|, reported against the interpolation and
    strict-bound conditions."""
    if grid_points_per_degree < 8:
        raise ValidationError("grid_points_per_degree must be >= 8")
    knots = np.asarray(knots, dtype=float)
    u_values = np.asarray(u_values, dtype=complex)
    n_eff = max(p.degree, 1)
    if exclusion_radius is None:
        exclusion_radius = (4.0 * math.pi / n_eff) / 100.0

    interp_res = float(
        np.max(np.abs(eval_algebraic(p, knots) - u_values))
    ) if knots.size else 0.0

    grid_size = grid_points_per_degree * n_eff
    tg = np.linspace(0.0, math.pi, grid_size)
    beta = p.cheb_coeffs
    kk = np.arange(p.degree + 1)

    def absq(t):
        return np.abs(np.cos(np.multiply.outer(t, kk)) @ beta)

    vals = absq(tg)
    tk = np.arccos(np.clip(knots, -1.0, 1.0))

    # candidate maxima: interior local maxima of |P| on the grid, the grid
    # endpoints, and samples at the exclusion-ball edges around each knot
    interior = np.where(
        (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    )[0] + 1
    cand_t = []
    cand_v = []
    for i in interior:
        res = minimize_scalar(
            lambda t: -float(absq(np.array([t]))[0]),
            bounds=(tg[i - 1], tg[i + 1]),
            method="bounded",
            options={"xatol": 1e-12},
        )
        cand_t.append(float(res.x))
        cand_v.append(float(-res.fun))
    edge_pts = [0.0, math.pi]
    for t0 in tk:
        edge_pts.extend([t0 - exclusion_radius, t0 + exclusion_radius])
    edge_pts = np.clip(np.array(edge_pts), 0.0, math.pi)
    cand_t.extend(edge_pts.tolist())
    cand_v.extend(absq(edge_pts).tolist())
    cand_t = np.concatenate([np.array(cand_t), tg])
    cand_v = np.concatenate([np.array(cand_v), vals])

    if tk.size:
        dist = np.min(np.abs(cand_t[:, None] - tk[None, :]), axis=1)
    else:
        dist = np.full(cand_t.shape, np.inf)
    off = dist >= exclusion_radius
    off_support_max = float(cand_v[off].max()) if off.any() else 0.0
    near_knot_ok = bool(np.all(cand_v[~off] <= 1.0 + eval_tol))

    passed = (interp_res <= interp_tol
              and off_support_max < 1.0
              and near_knot_ok)
    return CertificateReport(
        interpolation_residual=interp_res,
        off_support_max=off_support_max,
        near_knot_ok=near_knot_ok,
        grid_size=grid_size,
        exclusion_radius=float(exclusion_radius),
        passed=passed,
    )
