"""Classical dynamics: observables, sampling, ensembles, chaos diagnostics."""

import numpy as np
import pytest

from gethlab import classical
from gethlab.classical import (
    chaos_fraction,
    chaos_metric_fast,
    classical_observables,
    equations_of_motion,
    hamiltonian_per_particle,
    integrate,
    propagate,
    run_ensemble,
    sample_initial_conditions,
    symmetry_breaking_fraction,
)

J, U = 1.0, -5.0


def _state(seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(6)
    return y * np.sqrt(2.0) / np.linalg.norm(y)


def test_eom_matches_finite_differences():
    # [DERIVED] oracle: central differences of H/N with symplectic pairing
    y = _state(0)
    eps = 1e-6
    grad = np.empty(6)
    for i in range(6):
        up, dn = y.copy(), y.copy()
        up[i] += eps
        dn[i] -= eps
        grad[i] = (hamiltonian_per_particle(up, J, U)
                   - hamiltonian_per_particle(dn, J, U)) / (2 * eps)
    rhs = equations_of_motion(y, J, U)
    expect = np.concatenate([grad[3:], -grad[:3]])
    assert np.abs(rhs - expect).max() <= 1e-7 * max(1.0, np.abs(rhs).max())


def test_single_site_condensate():
    # [DERIVED] all particles on one site: H/N = U, I/N has unit modulus
    y = np.array([np.sqrt(2.0), 0, 0, 0, 0, 0])
    assert hamiltonian_per_particle(y, J, U) == pytest.approx(U)
    imb, cur, hop = classical_observables(y)
    assert abs(imb) == pytest.approx(1.0)
    assert cur == pytest.approx(0.0)
    assert hop == pytest.approx(0.0)


def test_observables_transform_under_rotation():
    # cycling the sites multiplies I/N by omega and preserves C/N, and the
    # balanced state has zero imbalance
    y = _state(1)
    rotated = np.concatenate([np.roll(y[:3], 1), np.roll(y[3:], 1)])
    imb, cur, _ = classical_observables(y)
    imb_r, cur_r, _ = classical_observables(rotated)
    omega = np.exp(2j * np.pi / 3)
    assert imb_r == pytest.approx(omega * imb, abs=1e-12)
    assert cur_r == pytest.approx(cur, abs=1e-12)
    balanced = np.array([1, 1, 1, 0, 0, 0]) * np.sqrt(2.0 / 3.0)
    assert abs(classical_observables(balanced)[0]) <= 1e-15


def test_sampler_on_shell_and_deterministic():
    pts = sample_initial_conditions(-2.7, count=64, seed=5)
    assert pts.shape == (64, 6)
    norms = (pts**2).sum(axis=1)
    assert np.abs(norms - 2.0).max() <= 1e-12
    h = hamiltonian_per_particle(pts, J, U)
    assert np.abs(h + 2.7).max() <= 0.05
    again = sample_initial_conditions(-2.7, count=64, seed=5)
    assert np.array_equal(pts, again)


def test_sampler_forbidden_window_raises():
    with pytest.raises(RuntimeError):
        sample_initial_conditions(+10.0, count=4, seed=0, batch=1 << 12,
                                  min_acceptance=1e-3)


def test_propagate_conserves_energy_and_norm():
    y0 = _state(2)
    res = integrate(y0, J, U, t_max=200.0)
    assert res.valid
    assert res.energy_drift <= 1e-8
    assert res.norm_drift <= 1e-8
    assert res.energy_per_particle == pytest.approx(
        hamiltonian_per_particle(y0, J, U)
    )


def test_propagate_modes_agree_short_time():
    # [DERIVED] the extended-precision RK4 is an independent oracle
    y0 = _state(3)
    fast, ok_f = propagate(y0, J, U, 5.0, mode="fast")
    slow, ok_s = propagate(y0, J, U, 5.0, mode="paper", dt=1e-3, dps=20)
    assert ok_f and ok_s
    assert np.abs(fast - slow).max() <= 1e-8
    with pytest.raises(ValueError):
        propagate(y0, J, U, 5.0, mode="bogus")


def test_condensate_stays_symmetry_broken():
    # the single-site condensate keeps |I/N| = 1 for all time (density frozen)
    y0 = np.array([np.sqrt(2.0), 0, 0, 0, 0, 0])
    res = integrate(y0, J, U, t_max=200.0)
    assert abs(res.avg_imbalance) >= 0.9
    assert res.breaks_rotation


def test_chaos_metric_separates_regimes():
    # low energy is regular (self-trapped), mid energy is chaotic
    regular = sample_initial_conditions(-4.6, count=1, seed=11)[0]
    chaotic = sample_initial_conditions(-2.7, count=1, seed=11)[0]
    m_reg = chaos_metric_fast(regular, J, U, t_max=400.0)
    m_cha = chaos_metric_fast(chaotic, J, U, t_max=400.0)
    assert m_reg < classical.CHAOS_THRESHOLD
    assert m_cha > classical.CHAOS_THRESHOLD


def test_ensemble_worker_schedule_invariance():
    serial = run_ensemble(-2.7, count=6, seed=9, t_max=120.0, with_chaos=False)
    threaded = run_ensemble(-2.7, count=6, seed=9, t_max=120.0,
                            with_chaos=False, workers=3)
    for a, b in zip(serial, threaded):
        assert np.array_equal(a.initial, b.initial)
        assert a.avg_current == b.avg_current
        assert a.avg_imbalance == b.avg_imbalance


def test_fraction_helpers():
    res = run_ensemble(-2.7, count=4, seed=1, t_max=150.0, with_chaos=True)
    f = chaos_fraction(res)
    assert 0.0 <= f <= 1.0
    fi, fc = symmetry_breaking_fraction(res)
    assert 0.0 <= fi <= 1.0 and 0.0 <= fc <= 1.0
    assert chaos_fraction([]) != chaos_fraction([])      # nan for empty input
