"""Monte Carlo microcanonical shell averages."""

import numpy as np
import pytest

from gethlab.microcan import McEstimate, McGrid, mc_average, mc_grid

SAMPLES = 400_000


def test_symmetry_protected_averages_vanish():
    # the shell measure is invariant under site rotation and reflection, so
    # the order parameters average to zero within a few standard errors
    for kind in ("current", "imbalance"):
        est = mc_average(kind, -2.7, n_samples=SAMPLES, seed=3)
        assert est.accepted > 0
        assert abs(est.value) <= 6.0 * max(est.stderr, 1e-6)


def test_h12_between_bounds_and_repeatable():
    est = mc_average("hopping12", -2.7, n_samples=SAMPLES, seed=1)
    assert -1.0 <= est.value.real <= 1.0
    again = mc_average("hopping12", -2.7, n_samples=SAMPLES, seed=1)
    assert est.value == again.value
    assert est.accepted == again.accepted
    other_seed = mc_average("hopping12", -2.7, n_samples=SAMPLES, seed=2)
    assert est.value != other_seed.value


def test_stderr_shrinks_with_samples():
    small = mc_average("hopping12", -2.7, n_samples=SAMPLES // 4, seed=4)
    large = mc_average("hopping12", -2.7, n_samples=4 * SAMPLES, seed=4)
    assert large.stderr < small.stderr


def test_ball_and_sphere_domains_differ():
    sph = mc_average("hopping12", -2.7, n_samples=SAMPLES, seed=5)
    ball = mc_average("hopping12", -2.7, n_samples=SAMPLES, seed=5,
                      domain="ball")
    assert abs(sph.value - ball.value) > 5 * (sph.stderr + ball.stderr)
    with pytest.raises(ValueError):
        mc_average("hopping12", -2.7, n_samples=1000, domain="torus")


def test_empty_shell_flags():
    est = mc_average("hopping12", +50.0, n_samples=10_000, seed=0)
    assert est.accepted == 0
    assert np.isnan(np.real(est.value))
    assert est.low_confidence


def test_low_confidence_threshold():
    est = McEstimate("hopping12", -2.7, 0.1, 0.01, 999, 10_000, 0.01)
    assert est.low_confidence
    est = McEstimate("hopping12", -2.7, 0.1, 0.01, 1000, 10_000, 0.01)
    assert not est.low_confidence


def test_grid_interpolation_and_bounds():
    grid = mc_grid("hopping12", np.array([-3.0, -2.6, -2.2]),
                   n_samples=SAMPLES // 4, seed=7)
    v = grid(-2.8)
    lo, hi = sorted((grid.values[0].real, grid.values[1].real))
    assert lo <= v <= hi
    assert grid(-2.6) == pytest.approx(grid.values[1].real)
    with pytest.raises(ValueError):
        grid(-3.5)
    with pytest.raises(ValueError):
        mc_grid("hopping12", np.array([-2.0, -3.0]), n_samples=1000)
