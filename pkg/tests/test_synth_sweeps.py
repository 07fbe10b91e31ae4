"""Tests for synthetic instance generation and phase-transition sweeps."""
import math

import numpy as np
import pytest

from polyspike.exceptions import GenerationError
from polyspike.bivariate import check_separation_2d
from polyspike.measures import DiracMeasure, check_separation
from polyspike.solvers import lp_grid
from polyspike.sweeps import CSV_HEADER, exact_match, phase_sweep
from polyspike.synth import (
    random_spikes,
    random_spikes_2d,
    random_spline,
    separated_t_knots,
)


# -- generators ----------------------------------------------------------------

def test_random_spikes_deterministic():
    a = random_spikes(1, 6, 128, 4.0)
    b = random_spikes(1, 6, 128, 4.0)
    assert a == b


def test_random_spikes_satisfy_separation():
    for seed in range(5):
        m = random_spikes(seed, 10, 128, 4.0)
        assert check_separation(m.locations, 128).satisfied


def test_random_spikes_weight_modes():
    m = random_spikes(0, 5, 128, 4.0, weights="complex_unit")
    np.testing.assert_allclose(np.abs(m.weights), 1.0)
    m = random_spikes(0, 5, 128, 4.0, weights="nonnegative")
    assert np.all(m.weights.real >= 0.5)
    m = random_spikes(0, 5, 128, 4.0, weights="signed_real")
    assert np.max(np.abs(m.weights.imag)) == 0.0
    with pytest.raises(ValueError):
        random_spikes(0, 5, 128, 4.0, weights="huge")


def test_random_spikes_snap_to_grid():
    size = 16 * 64 + 1
    m = random_spikes(2, 6, 64, 4.0, weights="signed_real",
                      snap_grid_size=size)
    grid = lp_grid(size)
    for x in m.locations:
        assert np.min(np.abs(grid - x)) < 1e-12


def test_generation_infeasible_window():
    with pytest.raises(GenerationError, match="exceeds"):
        separated_t_knots(np.random.default_rng(0), 100, 64, 4.0)


def test_random_spline_is_valid_and_separated():
    s = random_spline(4, 3, 128, 2, 4.0)
    assert s.degree_r == 2
    assert len(s.knots) == 3
    assert check_separation(s.knots, 128).satisfied


def test_random_spikes_2d_satisfy_separation():
    m = random_spikes_2d(1, 4, 512, 5.76)
    assert check_separation_2d(m.locations, 512).satisfied


def test_random_spikes_2d_infeasible():
    with pytest.raises(GenerationError):
        random_spikes_2d(0, 50, 16, 5.76, max_tries=200)


# -- exact_match -----------------------------------------------------------------

def test_exact_match_accepts_identical():
    m = random_spikes(3, 4, 128, 4.0)
    assert exact_match(m, m)


def test_exact_match_rejects_count_mismatch():
    m = DiracMeasure([(0.0, 1.0), (0.5, 1.0)])
    assert not exact_match(DiracMeasure([(0.0, 1.0)]), m)


def test_exact_match_rejects_moved_atom():
    m = DiracMeasure([(0.0, 1.0)])
    shifted = DiracMeasure([(math.cos(math.pi / 2 - 1e-3), 1.0)])
    assert not exact_match(shifted, m)


def test_exact_match_rejects_wrong_weight():
    m = DiracMeasure([(0.0, 1.0)])
    assert not exact_match(DiracMeasure([(0.0, 1.01)]), m)


# -- phase_sweep -------------------------------------------------------------------

def test_phase_sweep_header_and_shape():
    csv = phase_sweep(2, 3.0, 4.0, 2, 64, 3, master_seed=0, timing=False)
    lines = csv.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert CSV_HEADER == ("factor,sep_radians,pencil_success_rate,"
                          "lp_success_rate,mean_runtime_ms")
    assert len(lines) == 3
    first = lines[1].split(",")
    assert float(first[0]) == 3.0
    assert float(first[1]) == pytest.approx(3.0 * math.pi / 64)
    assert first[4] == "0.0"


def test_phase_sweep_parallelism_independence():
    kwargs = dict(trials=3, sep_min_factor=3.5, sep_max_factor=4.5, steps=2,
                  N=64, M=3, master_seed=7, timing=False)
    assert (phase_sweep(parallelism=1, **kwargs)
            == phase_sweep(parallelism=4, **kwargs))


def test_phase_sweep_succeeds_in_theorem_regime():
    csv = phase_sweep(3, 4.0, 5.0, 2, 128, 4, master_seed=1, timing=False)
    for line in csv.strip().split("\n")[1:]:
        _, _, pencil, lp, _ = line.split(",")
        assert float(pencil) == 1.0
        assert float(lp) == 1.0


def test_phase_sweep_rejects_single_step():
    with pytest.raises(ValueError):
        phase_sweep(1, 1.0, 2.0, 1, 64, 2, master_seed=0)
