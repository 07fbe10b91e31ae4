"""Bivariate spike recovery: 2D separation checking, tensor Chebyshev
moments, four-fold-reflected dual certificates, and LP recovery."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.optimize import linprog, minimize

from .bases import BasisSpec, basis_matrix
from .certificates import COND_WARN, _kernel_coeffs, _kernel_eval, kernel_degree
from .exceptions import (
    CertificateConstructionError,
    InfeasibleError,
    NonconvergenceError,
    SeparationViolationError,
    ValidationError,
)
from .measures import SeparationReport, _arccos
from .certificates import CertificateReport
from .solvers import SolverOptions, _LP_OPTIONS

#: factor required by the proof chain; Definition-level 4.76 is selectable
SAFE_THRESHOLD_FACTOR = 5.76


@dataclass(frozen=True)
class DiracMeasure2D:
    """Finite sum of real-weighted Dirac atoms on (-1, 1)^2."""

    atoms: tuple[tuple[tuple[float, float], float], ...]

    def __init__(self, atoms):
        pairs = []
        for loc, w in atoms:
            w = float(w)
            if w == 0.0:
                continue
            x1, x2 = float(loc[0]), float(loc[1])
            if not (-1.0 < x1 < 1.0 and -1.0 < x2 < 1.0):
                raise ValidationError(f"location {(x1, x2)} outside (-1,1)^2")
            pairs.append(((x1, x2), w))
        pairs.sort(key=lambda p: p[0])
        for (a, _), (b, _) in zip(pairs, pairs[1:]):
            if abs(a[0] - b[0]) < 1e-12 and abs(a[1] - b[1]) < 1e-12:
                raise ValidationError(f"duplicate atom location {a}")
        object.__setattr__(self, "atoms", tuple(pairs))

    @property
    def locations(self) -> np.ndarray:
        return np.array([loc for loc, _ in self.atoms], dtype=float)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms], dtype=float)

    def __len__(self):
        return len(self.atoms)


@dataclass(frozen=True)
class BivariatePoly:
    """P(x) = sum b[k1, k2] T_k1(x1) T_k2(x2)."""

    N: int
    cheb_coeffs: np.ndarray  # (N+1, N+1) real
    warnings: tuple[str, ...] = field(default=(), compare=False)


def check_separation_2d(locations, N: int,
                        threshold_factor: float = SAFE_THRESHOLD_FACTOR
                        ) -> SeparationReport:
    """Componentwise-max separation in the arccos metric, plus the per-axis
    domain window."""
    locations = [(float(a), float(b)) for a, b in locations]
    threshold = threshold_factor * math.pi / N
    lo = math.cos(math.pi - 2.0 * math.pi / N)
    hi = math.cos(2.0 * math.pi / N)
    domain_violations = []
    for loc in locations:
        if any(v < lo - 1e-12 or v > hi + 1e-12 for v in loc):
            domain_violations.append(loc)
    t = [(_arccos(a), _arccos(b)) for a, b in locations]
    min_dist = math.inf
    pair_violations = []
    for i in range(len(t)):
        for j in range(i + 1, len(t)):
            d = max(abs(t[i][0] - t[j][0]), abs(t[i][1] - t[j][1]))
            min_dist = min(min_dist, d)
            if d < threshold - 1e-12:
                pair_violations.append((i, j))
    return SeparationReport(
        satisfied=not domain_violations and not pair_violations,
        threshold=threshold,
        min_pair_distance=min_dist,
        domain_violations=tuple(domain_violations),
        pair_violations=tuple(pair_violations),
        below_theorem_n=N < 512,
    )


def moments_2d(m: DiracMeasure2D, N: int) -> np.ndarray:
    """Tensor Chebyshev moments Y[k1, k2] = sum_m c_m T_k1(x1) T_k2(x2)."""
    if len(m) == 0:
        return np.zeros((N + 1, N + 1))
    spec = BasisSpec("chebyshev", N)
    locs = m.locations
    T1 = basis_matrix(spec, locs[:, 0])  # (M, N+1)
    T2 = basis_matrix(spec, locs[:, 1])
    return T1.T @ (m.weights[:, None] * T2)


def eval_bivariate(p: BivariatePoly, x1, x2) -> np.ndarray:
    """Pointwise evaluation at paired coordinates."""
    return np.polynomial.chebyshev.chebval2d(
        np.asarray(x1, dtype=float), np.asarray(x2, dtype=float),
        p.cheb_coeffs,
    )


def _reflect_2d(t_tilde: np.ndarray, u: np.ndarray):
    """Reflect points in (-pi, 0)^2 into all four sign quadrants."""
    pts = []
    vals = []
    for (s1, s2) in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        for (a, b), v in zip(t_tilde, u):
            pts.append((s1 * a, s2 * b))
            vals.append(v)
    return np.array(pts), np.array(vals)


def build_certificate_2d(locations, signs, N: int, *,
                         threshold_factor: float = SAFE_THRESHOLD_FACTOR,
                         check: bool = True) -> BivariatePoly:
    """Tensor Jackson-kernel interpolant with value and gradient-zero
    conditions at every four-fold-reflected point, averaged into pure
    cosine-cosine (Chebyshev tensor) form."""
    locations = np.asarray(locations, dtype=float).reshape(-1, 2)
    signs = np.asarray(signs, dtype=float)
    if signs.shape != (locations.shape[0],):
        raise ValidationError("need one sign per location")
    if np.any(np.abs(np.abs(signs) - 1.0) > 1e-9):
        raise ValidationError("interpolation values must be +-1")
    if check:
        report = check_separation_2d(locations, N, threshold_factor)
        if not report.satisfied:
            raise SeparationViolationError(
                f"locations violate the 2D separation condition: "
                f"domain {report.domain_violations}, "
                f"pairs {report.pair_violations}"
            )
    t_tilde = -np.arccos(locations)  # (-pi, 0)^2
    T, u = _reflect_2d(t_tilde, signs)
    P = T.shape[0]
    m, deg = kernel_degree(N)
    d1 = T[:, 0][:, None] - T[:, 0][None, :]
    d2 = T[:, 1][:, None] - T[:, 1][None, :]
    K0a, K1a, K2a = (_kernel_eval(m, d1, i) for i in range(3))
    K0b, K1b, K2b = (_kernel_eval(m, d2, i) for i in range(3))
    A = np.block([
        [K0a * K0b, K1a * K0b, K0a * K1b],
        [K1a * K0b, K2a * K0b, K1a * K1b],
        [K0a * K1b, K1a * K1b, K0a * K2b],
    ])
    scale = np.abs(A).max(axis=0)
    scale[scale == 0] = 1.0
    A_eq = A / scale
    cond = np.linalg.cond(A_eq)
    warnings = []
    if not np.isfinite(cond):
        raise CertificateConstructionError("interpolation system is singular")
    if cond > COND_WARN:
        warnings.append(f"interpolation system condition estimate {cond:.3e}")
    if N < 512:
        warnings.append(f"N = {N} is below the guaranteed regime (N >= 512)")
    rhs = np.concatenate([u, np.zeros(2 * P)])
    try:
        sol = scipy.linalg.solve(A_eq, rhs) / scale
    except scipy.linalg.LinAlgError as exc:
        raise CertificateConstructionError(
            "interpolation system is singular"
        ) from exc
    a, b1, b2 = sol[:P], sol[P: 2 * P], sol[2 * P:]

    kappa = _kernel_coeffs(m)
    k = np.arange(-deg, deg + 1)
    E1 = np.exp(-1j * np.outer(k, T[:, 0]))  # (2deg+1, P)
    E2 = np.exp(-1j * np.outer(k, T[:, 1]))
    V1 = kappa[:, None] * E1
    V2 = kappa[:, None] * E2
    D1 = (1j * k)[:, None] * V1
    D2 = (1j * k)[:, None] * V2
    F = (V1 * a) @ V2.T + (D1 * b1) @ V2.T + (V1 * b2) @ D2.T

    # average the four reflections and fold into cosine-cosine coefficients
    idx = deg + np.arange(deg + 1)
    neg = deg - np.arange(deg + 1)
    Fs = 0.25 * (F[np.ix_(idx, idx)] + F[np.ix_(neg, idx)]
                 + F[np.ix_(idx, neg)] + F[np.ix_(neg, neg)])
    g = np.full(deg + 1, 2.0)
    g[0] = 1.0
    b = np.real(Fs) * np.outer(g, g)
    out = np.zeros((N + 1, N + 1))
    lim = min(deg, N) + 1
    out[:lim, :lim] = b[:lim, :lim]
    return BivariatePoly(N, out, tuple(warnings))


def verify_certificate_2d(p: BivariatePoly, locations, signs,
                          grid_points_per_degree: int = 4,
                          exclusion_radius: float | None = None,
                          interp_tol: float = 1e-7,
                          eval_tol: float = 1e-9,
                          refine_threshold: float = 0.5
                          ) -> CertificateReport:
    """Tensor grid scan uniform in (t1, t2), plus local refinement of the
    prominent maxima of |P| and sampling along the exclusion-box edges."""
    if grid_points_per_degree < 4:
        raise ValidationError("grid_points_per_degree must be >= 4")
    locations = np.asarray(locations, dtype=float).reshape(-1, 2)
    signs = np.asarray(signs, dtype=float)
    N = max(p.N, 1)
    if exclusion_radius is None:
        exclusion_radius = (4.0 * math.pi / N) / 100.0

    interp_res = float(np.max(np.abs(
        eval_bivariate(p, locations[:, 0], locations[:, 1]) - signs
    ))) if locations.size else 0.0

    G = grid_points_per_degree * N + 1
    tg = np.linspace(0.0, math.pi, G)
    ks = np.arange(p.N + 1)
    Cmat = np.cos(np.outer(tg, ks))  # (G, N+1)
    vals = np.abs(Cmat @ p.cheb_coeffs @ Cmat.T)

    tk = np.arccos(np.clip(locations, -1.0, 1.0))  # (M, 2)

    def dist_to_support(t1, t2):
        if tk.size == 0:
            return np.inf
        return np.min(np.maximum(np.abs(t1 - tk[:, 0]),
                                 np.abs(t2 - tk[:, 1])))

    def absq(t1, t2):
        return float(abs(np.polynomial.chebyshev.chebval2d(
            math.cos(t1), math.cos(t2), p.cheb_coeffs)))

    # grid contributions
    T1g, T2g = np.meshgrid(tg, tg, indexing="ij")
    if tk.size:
        dist = np.min(
            np.maximum(
                np.abs(T1g[..., None] - tk[None, None, :, 0]),
                np.abs(T2g[..., None] - tk[None, None, :, 1]),
            ),
            axis=2,
        )
    else:
        dist = np.full(vals.shape, np.inf)
    off = dist >= exclusion_radius
    off_max = float(vals[off].max()) if off.any() else 0.0
    near_vals = [float(vals[~off].max())] if (~off).any() else []

    # local refinement of prominent interior maxima
    interior = vals[1:-1, 1:-1]
    is_max = (
        (interior >= vals[:-2, 1:-1]) & (interior >= vals[2:, 1:-1])
        & (interior >= vals[1:-1, :-2]) & (interior >= vals[1:-1, 2:])
        & (interior >= refine_threshold)
    )
    h = tg[1] - tg[0]
    for i, j in zip(*np.where(is_max)):
        t1, t2 = tg[i + 1], tg[j + 1]
        res = minimize(
            lambda v: -absq(v[0], v[1]),
            x0=[t1, t2],
            bounds=[(max(t1 - h, 0.0), min(t1 + h, math.pi)),
                    (max(t2 - h, 0.0), min(t2 + h, math.pi))],
            method="L-BFGS-B",
        )
        v = float(-res.fun)
        if dist_to_support(res.x[0], res.x[1]) >= exclusion_radius:
            off_max = max(off_max, v)
        else:
            near_vals.append(v)

    # edges of the exclusion box around each knot
    for t1k, t2k in tk:
        s = np.linspace(-exclusion_radius, exclusion_radius, 65)
        for edge_t1, edge_t2 in (
            (t1k - exclusion_radius + 0 * s, t2k + s),
            (t1k + exclusion_radius + 0 * s, t2k + s),
            (t1k + s, t2k - exclusion_radius + 0 * s),
            (t1k + s, t2k + exclusion_radius + 0 * s),
        ):
            e1 = np.clip(edge_t1, 0.0, math.pi)
            e2 = np.clip(edge_t2, 0.0, math.pi)
            ev = np.abs(np.polynomial.chebyshev.chebval2d(
                np.cos(e1), np.cos(e2), p.cheb_coeffs))
            for t1, t2, v in zip(e1, e2, ev):
                if dist_to_support(t1, t2) >= exclusion_radius:
                    off_max = max(off_max, float(v))
                else:
                    near_vals.append(float(v))

    near_ok = all(v <= 1.0 + eval_tol for v in near_vals)
    passed = interp_res <= interp_tol and off_max < 1.0 and near_ok
    return CertificateReport(
        interpolation_residual=interp_res,
        off_support_max=off_max,
        near_knot_ok=near_ok,
        grid_size=G,
        exclusion_radius=float(exclusion_radius),
        passed=passed,
    )


def recover_spikes_2d(Y: np.ndarray,
                      opts: SolverOptions | None = None) -> DiracMeasure2D:
    """LP recovery on a 2D grid uniform in (t1, t2): signed decomposition
    c+ - c- as in 1D, with tensor Chebyshev constraints."""
    opts = opts or SolverOptions()
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValidationError("moment matrix must be square")
    N = Y.shape[0] - 1
    if np.max(np.abs(Y)) == 0.0:
        return DiracMeasure2D([])
    size = opts.lp_grid_size or 2 * N + 1
    t = np.linspace(math.pi, 0.0, size)
    x = np.cos(t)
    spec = BasisSpec("chebyshev", N)
    Cmat = basis_matrix(spec, x).T  # (N+1, G)
    A = np.kron(Cmat, Cmat)  # ((N+1)^2, G^2)
    # The constraint matrix is fully dense, so every extra copy costs its
    # full size; build the CSC arrays by hand (no COO detour) and hand the
    # solver the signed doubling without materializing [A, -A] densely.
    nrow, ncol = A.shape
    if opts.lp_nonnegative:
        data = A.ravel(order="F")
        nvar = size * size
    else:
        data = np.concatenate([A.ravel(order="F"), -A.ravel(order="F")])
        nvar = 2 * size * size
    del A
    indices = np.tile(np.arange(nrow, dtype=np.int32), nvar)
    indptr = np.arange(nvar + 1, dtype=np.int64) * nrow
    A_eq = scipy.sparse.csc_matrix(
        (data, indices, indptr), shape=(nrow, nvar), copy=False
    )
    res = linprog(
        c=np.ones(nvar),
        A_eq=A_eq,
        b_eq=Y.ravel(),
        bounds=(0, None),
        method="highs",
        options=_LP_OPTIONS,
    )
    if res.status == 2:
        raise InfeasibleError("moments are inconsistent with the grid")
    if res.status != 0:
        raise NonconvergenceError(res.message)
    sol = res.x[: size * size]
    if not opts.lp_nonnegative:
        sol = sol - res.x[size * size:]
    sol = sol.reshape(size, size)
    active_tol = max(1e-8, 1e-10 * np.abs(sol).sum())
    return DiracMeasure2D(_cluster_atoms_2d(x, sol, active_tol))


def _cluster_atoms_2d(x: np.ndarray, c: np.ndarray, active_tol: float):
    """Group 8-adjacent active cells into atoms by mass-weighted centroid."""
    active = np.abs(c) > active_tol
    visited = np.zeros_like(active)
    atoms = []
    idxs = np.argwhere(active)
    for i0, j0 in idxs:
        if visited[i0, j0]:
            continue
        stack = [(i0, j0)]
        visited[i0, j0] = True
        cluster = []
        while stack:
            i, j = stack.pop()
            cluster.append((i, j))
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    a, b = i + di, j + dj
                    if (0 <= a < c.shape[0] and 0 <= b < c.shape[1]
                            and active[a, b] and not visited[a, b]):
                        visited[a, b] = True
                        stack.append((a, b))
        mass = np.array([abs(c[i, j]) for i, j in cluster])
        w = sum(c[i, j] for i, j in cluster)
        loc1 = sum(m * x[i] for m, (i, _) in zip(mass, cluster)) / mass.sum()
        loc2 = sum(m * x[j] for m, (_, j) in zip(mass, cluster)) / mass.sum()
        # keep centroids inside the open square (grid endpoints sit at +-1)
        loc1 = min(max(float(loc1), -1.0 + 1e-12), 1.0 - 1e-12)
        loc2 = min(max(float(loc2), -1.0 + 1e-12), 1.0 - 1e-12)
        atoms.append(((loc1, loc2), float(w)))
    return atoms
