"""Tests for Dirac measures, splines, the arccos metric, and separation."""
import math

import numpy as np
import pytest

from polyspike.exceptions import DomainError, ValidationError
from polyspike.measures import (
    DiracMeasure,
    Spline,
    cheb_distance,
    check_separation,
    eval_spline,
    spline_distributional_derivative,
    tv_norm,
)


# -- cheb_distance ------------------------------------------------------------

def test_distance_endpoints():
    assert cheb_distance(1.0, -1.0) == pytest.approx(math.pi)


def test_distance_half_pi():
    assert cheb_distance(0.0, 1.0) == pytest.approx(math.pi / 2)


def test_distance_from_angles():
    assert cheb_distance(math.cos(0.3), math.cos(0.7)) == pytest.approx(0.4)


def test_distance_is_metric_on_random_triples():
    rng = np.random.default_rng(0)
    for _ in range(200):
        x, y, z = rng.uniform(-1.0, 1.0, size=3)
        assert cheb_distance(x, y) == pytest.approx(cheb_distance(y, x))
        assert cheb_distance(x, x) == 0.0
        assert (cheb_distance(x, z)
                <= cheb_distance(x, y) + cheb_distance(y, z) + 1e-14)


def test_distance_zero_iff_equal():
    assert cheb_distance(0.3, 0.3) == 0.0
    assert cheb_distance(0.3, 0.300001) > 0.0


def test_distance_domain_error():
    with pytest.raises(DomainError):
        cheb_distance(1.1, 0.0)
    with pytest.raises(DomainError):
        cheb_distance(0.0, -1.0 - 1e-6)


def test_distance_clamps_tiny_overshoot():
    # values within the 1e-12 clamp tolerance are treated as the endpoint
    assert cheb_distance(1.0 + 1e-13, 1.0) == 0.0


# -- DiracMeasure -------------------------------------------------------------

def test_measure_sorts_and_drops_zero_weights():
    m = DiracMeasure([(0.5, 2.0), (-0.5, 1.0), (0.0, 0.0)])
    assert m.locations.tolist() == [-0.5, 0.5]
    assert m.weights.tolist() == [1.0 + 0j, 2.0 + 0j]
    assert len(m) == 2


def test_measure_rejects_duplicates():
    with pytest.raises(ValidationError):
        DiracMeasure([(0.5, 1.0), (0.5 + 1e-14, 1.0)])


def test_measure_rejects_out_of_domain():
    with pytest.raises(DomainError):
        DiracMeasure([(1.5, 1.0)])


# -- tv_norm ------------------------------------------------------------------

def test_tv_norm_complex_weight():
    assert tv_norm(DiracMeasure([(0.5, 3 + 4j)])) == pytest.approx(5.0)


def test_tv_norm_empty():
    assert tv_norm(DiracMeasure([])) == 0.0


def test_tv_norm_signed():
    assert tv_norm(DiracMeasure([(-0.2, 1.0), (0.3, -2.0)])) == pytest.approx(3.0)


# -- check_separation ---------------------------------------------------------

def test_separation_at_exact_threshold():
    N = 128
    locs = [math.cos(math.pi / 2), math.cos(math.pi / 2 + 4 * math.pi / N)]
    report = check_separation(locs, N)
    assert report.satisfied
    assert report.min_pair_distance == pytest.approx(4 * math.pi / N)
    assert not report.below_theorem_n


def test_separation_domain_violation():
    report = check_separation([0.999], 128)
    assert not report.satisfied
    assert report.domain_violations == (0.999,)


def test_separation_single_point_trivially_satisfied():
    report = check_separation([0.0], 128)
    assert report.satisfied
    assert math.isinf(report.min_pair_distance)


def test_separation_empty_trivially_satisfied():
    assert check_separation([], 128).satisfied


def test_separation_flags_small_n():
    assert check_separation([0.0], 64).below_theorem_n


def test_separation_pair_violation_indices():
    N = 128
    t = [math.pi / 2, math.pi / 2 + math.pi / N]
    report = check_separation([math.cos(v) for v in t], N)
    assert not report.satisfied
    assert report.pair_violations == ((0, 1),)


def test_separation_satisfied_iff_no_violations():
    rng = np.random.default_rng(3)
    for _ in range(50):
        locs = np.cos(rng.uniform(0.05, math.pi - 0.05, size=5))
        report = check_separation(locs, 128)
        assert report.satisfied == (
            not report.domain_violations and not report.pair_violations
        )


# -- Spline -------------------------------------------------------------------

def step_spline():
    return Spline(0, [0.0], [(0.0,), (1.0,)])


def test_eval_step_spline_left():
    assert eval_spline(step_spline(), -0.5) == 0.0


def test_eval_step_spline_knot_belongs_right():
    assert eval_spline(step_spline(), 0.0) == 1.0


def test_eval_step_spline_closed_right_end():
    assert eval_spline(step_spline(), 1.0) == 1.0


def test_eval_spline_domain_error():
    with pytest.raises(DomainError):
        eval_spline(step_spline(), 1.5)


def test_spline_piece_count_validation():
    with pytest.raises(ValidationError):
        Spline(0, [0.0], [(1.0,)])


def test_spline_knot_order_validation():
    with pytest.raises(ValidationError):
        Spline(0, [0.5, 0.0], [(0.0,), (1.0,), (2.0,)])


def test_spline_knot_domain_validation():
    with pytest.raises(ValidationError):
        Spline(0, [1.0], [(0.0,), (1.0,)])


def test_spline_continuity_validation():
    # r = 1 requires value continuity at the knot; these pieces jump
    with pytest.raises(ValidationError):
        Spline(1, [0.0], [(0.0, 1.0), (5.0, 1.0)])


def test_spline_boundary_mismatch_validation():
    with pytest.raises(ValidationError):
        Spline(0, [0.0], [(0.0,), (1.0,)], boundary_left=(7.0,))


def test_spline_derived_boundary_values():
    s = step_spline()
    assert s.boundary_left == (0j,)
    assert s.boundary_right == (1 + 0j,)


# -- spline_distributional_derivative ----------------------------------------

def test_derivative_of_step_is_dirac():
    d = spline_distributional_derivative(step_spline())
    assert isinstance(d, DiracMeasure)
    assert d.atoms == ((0.0, 1 + 0j),)


def test_derivative_of_hat_spline():
    # slope +1 then -1, continuous at the knot
    s = Spline(1, [0.0], [(1.0, 1.0), (1.0, -1.0)])
    d = spline_distributional_derivative(s)
    assert isinstance(d, Spline)
    assert d.degree_r == 0
    assert d.pieces == ((1 + 0j,), (-1 + 0j,))


def test_derivative_of_constant_is_empty_measure():
    s = Spline(0, [], [(3.0,)])
    d = spline_distributional_derivative(s)
    assert isinstance(d, DiracMeasure)
    assert len(d) == 0


def test_tv_of_step_derivative_is_sum_of_jumps():
    s = Spline(0, [-0.3, 0.4], [(1.0,), (-1.0,), (2.5,)])
    d = spline_distributional_derivative(s)
    assert tv_norm(d) == pytest.approx(abs(-1.0 - 1.0) + abs(2.5 - (-1.0)))


def test_derivative_matches_finite_difference_off_knots():
    s = Spline(2, [0.0],
               [(0.0, 0.0, 1.0), (0.0, 0.0, 1.0)])
    d = spline_distributional_derivative(s)
    h = 1e-6
    for x in (-0.7, -0.2, 0.3, 0.8):
        fd = (eval_spline(s, x + h) - eval_spline(s, x - h)) / (2 * h)
        assert abs(eval_spline(d, x) - fd) < 1e-5
