"""Tests for polynomial bases, change of basis, derivative matrices, and
moment computation."""
import numpy as np
import pytest

from polyspike.bases import (
    BasisSpec,
    MomentVector,
    basis_matrix,
    change_of_basis,
    derivative_matrix,
    eval_basis,
    moments_of_dirac,
    moments_of_spline,
)
from polyspike.exceptions import ValidationError
from polyspike.measures import DiracMeasure, Spline


# -- BasisSpec / MomentVector -------------------------------------------------

def test_basis_spec_rejects_unknown_kind():
    with pytest.raises(ValidationError):
        BasisSpec("jacobi", 8)


def test_basis_spec_rejects_negative_degree():
    with pytest.raises(ValidationError):
        BasisSpec("chebyshev", -1)


def test_moment_vector_length_validation():
    with pytest.raises(ValidationError):
        MomentVector(BasisSpec("chebyshev", 3), [1.0, 2.0])


# -- eval_basis ---------------------------------------------------------------

def test_chebyshev_t3():
    assert eval_basis(BasisSpec("chebyshev", 4), 3, 0.5) == pytest.approx(-1.0)


def test_legendre_at_one():
    assert eval_basis(BasisSpec("legendre", 4), 2, 1.0) == pytest.approx(1.0)


def test_monomial_even_power():
    assert eval_basis(BasisSpec("monomial", 4), 4, -1.0) == pytest.approx(1.0)


def test_eval_basis_index_error():
    with pytest.raises(IndexError):
        eval_basis(BasisSpec("chebyshev", 4), 5, 0.0)


def test_basis_matrix_matches_numpy_families():
    x = np.linspace(-1, 1, 31)
    V = basis_matrix(BasisSpec("chebyshev", 10), x)
    for k in range(11):
        c = np.zeros(k + 1)
        c[k] = 1.0
        np.testing.assert_allclose(
            V[:, k], np.polynomial.chebyshev.chebval(x, c), atol=1e-13
        )
    V = basis_matrix(BasisSpec("legendre", 10), x)
    for k in range(11):
        c = np.zeros(k + 1)
        c[k] = 1.0
        np.testing.assert_allclose(
            V[:, k], np.polynomial.legendre.legval(x, c), atol=1e-13
        )


# -- derivative_matrix --------------------------------------------------------

def test_monomial_derivative_row():
    alpha = derivative_matrix(BasisSpec("monomial", 5)).entries
    expected = np.zeros(6)
    expected[2] = 3.0
    np.testing.assert_allclose(alpha[3], expected)


def test_monomial_derivative_is_subdiagonal():
    alpha = derivative_matrix(BasisSpec("monomial", 8)).entries
    for k in range(9):
        for n in range(9):
            want = float(k) if n == k - 1 else 0.0
            assert alpha[k, n] == want


def test_chebyshev_derivative_row():
    alpha = derivative_matrix(BasisSpec("chebyshev", 5)).entries
    expected = np.zeros(6)
    expected[0] = 3.0
    expected[2] = 6.0
    np.testing.assert_allclose(alpha[3], expected)


def test_legendre_derivative_row():
    alpha = derivative_matrix(BasisSpec("legendre", 5)).entries
    expected = np.zeros(6)
    expected[1] = 3.0
    np.testing.assert_allclose(alpha[2], expected)


def test_derivative_row_zero_is_zero():
    for kind in ("monomial", "chebyshev", "legendre"):
        alpha = derivative_matrix(BasisSpec(kind, 6)).entries
        np.testing.assert_array_equal(alpha[0], np.zeros(7))


# -- change_of_basis ----------------------------------------------------------

def test_monomial_to_chebyshev_moments_of_delta_at_zero():
    spec = BasisSpec("monomial", 6)
    y = moments_of_dirac(DiracMeasure([(0.0, 1.0)]), spec)
    z = change_of_basis(y, BasisSpec("chebyshev", 6))
    # T_k(0) = cos(k pi / 2)
    expected = [np.cos(k * np.pi / 2) for k in range(7)]
    np.testing.assert_allclose(z.asarray().real, expected, atol=1e-12)


def test_identity_conversion():
    spec = BasisSpec("legendre", 5)
    y = MomentVector(spec, np.arange(6, dtype=float))
    assert change_of_basis(y, spec).values == y.values


def test_chebyshev_legendre_round_trip():
    rng = np.random.default_rng(7)
    spec = BasisSpec("chebyshev", 32)
    y = MomentVector(spec, rng.normal(size=33) + 1j * rng.normal(size=33))
    back = change_of_basis(
        change_of_basis(y, BasisSpec("legendre", 32)), spec
    )
    err = np.linalg.norm(back.asarray() - y.asarray())
    assert err <= 1e-8 * np.linalg.norm(y.asarray())


def test_change_of_basis_degree_mismatch():
    y = MomentVector(BasisSpec("chebyshev", 4), np.ones(5))
    with pytest.raises(ValidationError):
        change_of_basis(y, BasisSpec("legendre", 5))


def test_change_of_basis_commutes_with_dirac_moments():
    rng = np.random.default_rng(11)
    m = DiracMeasure([(-0.6, 1.5), (0.1, -2.0 + 1j), (0.7, 0.5)])
    for src in ("monomial", "chebyshev", "legendre"):
        for dst in ("monomial", "chebyshev", "legendre"):
            y1 = moments_of_dirac(m, BasisSpec(src, 32))
            left = change_of_basis(y1, BasisSpec(dst, 32)).asarray()
            right = moments_of_dirac(m, BasisSpec(dst, 32)).asarray()
            err = np.linalg.norm(left - right)
            assert err <= 1e-8 * max(np.linalg.norm(right), 1.0)
    del rng


# -- moments_of_dirac ---------------------------------------------------------

def test_dirac_moments_at_zero_monomial():
    y = moments_of_dirac(DiracMeasure([(0.0, 1.0)]), BasisSpec("monomial", 4))
    np.testing.assert_allclose(y.asarray(), [1, 0, 0, 0, 0])


def test_dirac_moments_at_half_monomial():
    y = moments_of_dirac(DiracMeasure([(0.5, 2.0)]), BasisSpec("monomial", 3))
    np.testing.assert_allclose(y.asarray(), [2, 1, 0.5, 0.25])


def test_dirac_moments_at_half_chebyshev():
    y = moments_of_dirac(DiracMeasure([(0.5, 1.0)]), BasisSpec("chebyshev", 3))
    np.testing.assert_allclose(y.asarray(), [1, 0.5, -0.5, -1], atol=1e-14)


def test_dirac_moments_linearity():
    rng = np.random.default_rng(5)
    spec = BasisSpec("chebyshev", 16)
    m1 = DiracMeasure([(-0.4, 1.0 + 2j), (0.2, -1.0)])
    m2 = DiracMeasure([(0.6, 3.0)])
    a = 2.5 - 0.5j
    combined = DiracMeasure(
        [(x, a * w) for x, w in m1.atoms] + list(m2.atoms)
    )
    lhs = moments_of_dirac(combined, spec).asarray()
    rhs = (a * moments_of_dirac(m1, spec).asarray()
           + moments_of_dirac(m2, spec).asarray())
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * max(1.0, np.max(np.abs(rhs)))
    del rng


def test_dirac_moments_empty_measure():
    y = moments_of_dirac(DiracMeasure([]), BasisSpec("legendre", 4))
    np.testing.assert_array_equal(y.asarray(), np.zeros(5))


# -- moments_of_spline --------------------------------------------------------

def test_step_spline_monomial_moments():
    s = Spline(0, [0.0], [(0.0,), (1.0,)])
    y = moments_of_spline(s, BasisSpec("monomial", 3))
    np.testing.assert_allclose(
        y.asarray().real, [1, 1 / 2, 1 / 3, 1 / 4], atol=1e-14
    )


def test_zero_spline_moments():
    s = Spline(1, [], [(0.0, 0.0)])
    y = moments_of_spline(s, BasisSpec("chebyshev", 5))
    np.testing.assert_array_equal(y.asarray(), np.zeros(6))


def test_global_polynomial_reproduces_legendre_coefficients():
    # For f = sum_k c_k P_k, the Legendre moments are c_k * 2 / (2k + 1)
    rng = np.random.default_rng(9)
    c = rng.normal(size=7)
    mono = np.polynomial.legendre.leg2poly(c)
    s = Spline(6, [], [tuple(mono)])
    y = moments_of_spline(s, BasisSpec("legendre", 6)).asarray().real
    k = np.arange(7)
    recovered = y * (2 * k + 1) / 2.0
    assert np.max(np.abs(recovered - c)) <= 1e-10 * max(1.0, np.max(np.abs(c)))


def test_chebyshev_t2_moments_match_symbolic_integrals():
    # f(x) = T_2(x) = 2x^2 - 1; y_k = int_{-1}^{1} T_2 T_k dx computed
    # symbolically via monomial expansion
    s = Spline(2, [], [(-1.0, 0.0, 2.0)])
    y = moments_of_spline(s, BasisSpec("chebyshev", 4)).asarray().real

    def exact(k):
        c = np.zeros(k + 1)
        c[k] = 1.0
        tk = np.polynomial.chebyshev.cheb2poly(c)
        prod = np.polynomial.polynomial.polymul([-1.0, 0.0, 2.0], tk)
        anti = np.polynomial.polynomial.polyint(prod)
        return (np.polynomial.polynomial.polyval(1.0, anti)
                - np.polynomial.polynomial.polyval(-1.0, anti))

    np.testing.assert_allclose(y, [exact(k) for k in range(5)], atol=1e-13)
