"""Unfolding and Berry-Robnik spacing fits."""

import numpy as np
import pytest
import scipy.integrate

from gethlab.rmtstats import (
    MIN_LEVELS,
    SpacingWindow,
    berry_robnik_pdf,
    chaos_profile,
    fit_rho,
    unfold,
)


def _poisson(n, rng):
    return -np.log(1.0 - rng.random(n))


def _wigner(n, rng):
    return np.sqrt(-4.0 * np.log(1.0 - rng.random(n)) / np.pi)


def superposed_spacings(rho, n, rng):
    """Spacings of a Poisson + Wigner level superposition with regular
    fraction rho (each subsequence rescaled to mean spacing 1/weight)."""
    if rho == 0.0:
        return _wigner(n, rng)
    if rho == 1.0:
        return _poisson(n, rng)
    lp = np.cumsum(_poisson(int(1.7 * n * rho), rng) / rho)
    lw = np.cumsum(_wigner(int(1.7 * n * (1 - rho)), rng) / (1 - rho))
    levels = np.sort(np.concatenate([lp[lp < n], lw[lw < n]]))
    return np.diff(levels)


def test_pdf_limits_closed_form():
    # [DERIVED] rho = 1 is e^{-s}; rho = 0 is (pi s/2) e^{-pi s^2/4}
    s = np.linspace(0.0, 6.0, 200)
    assert np.abs(berry_robnik_pdf(s, 1.0) - np.exp(-s)).max() <= 1e-12
    wigner = 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s * s)
    assert np.abs(berry_robnik_pdf(s, 0.0) - wigner).max() <= 1e-12
    with pytest.raises(ValueError):
        berry_robnik_pdf(s, 1.5)


@pytest.mark.parametrize("rho", (0.0, 0.3, 0.7, 1.0))
def test_pdf_normalization_and_mean(rho):
    # [DERIVED] quadrature oracle: unit norm and unit mean spacing
    norm, _ = scipy.integrate.quad(lambda s: berry_robnik_pdf(s, rho), 0, 60)
    mean, _ = scipy.integrate.quad(lambda s: s * berry_robnik_pdf(s, rho), 0, 60)
    assert norm == pytest.approx(1.0, abs=1e-6)
    assert mean == pytest.approx(1.0, abs=1e-6)


def test_unfold_equal_spacing_exact():
    # [DERIVED] an equally spaced ladder unfolds to unit spacings exactly
    levels = np.linspace(0.0, 10.0, 120)
    win = unfold(levels, center=5.0, width=10.0)
    assert np.abs(win.spacings - 1.0).max() <= 1e-8
    assert win.center == 5.0


def test_unfold_poisson_spacing_distribution():
    rng = np.random.default_rng(0)
    levels = np.cumsum(_poisson(4000, rng))
    win = unfold(levels)
    s = win.spacings
    assert s.mean() == pytest.approx(1.0, abs=1e-12)
    # exponential distribution: var = 1, fraction below 1 is 1 - 1/e
    assert np.var(s) == pytest.approx(1.0, abs=0.1)
    assert np.mean(s < 1.0) == pytest.approx(1.0 - np.exp(-1.0), abs=0.03)


def test_unfold_monotone_fallback():
    # a clustered ladder can defeat the degree-4 fit; the cascade must still
    # return strictly positive spacings
    rng = np.random.default_rng(3)
    levels = np.sort(np.concatenate([rng.random(60), 100 + rng.random(60)]))
    win = unfold(levels)
    assert (win.spacings >= 0).all()
    assert win.spacings.mean() == pytest.approx(1.0)


def test_minimum_level_count():
    with pytest.raises(ValueError):
        unfold(np.arange(10.0))
    with pytest.raises(ValueError):
        fit_rho(np.ones(10))


@pytest.mark.parametrize("rho", (0.0, 0.25, 0.5, 0.75, 1.0))
def test_fit_rho_calibration(rho):
    rng = np.random.default_rng(42)
    s = superposed_spacings(rho, 5000, rng)
    s = s / s.mean()
    fit = fit_rho(s)
    assert abs(fit.rho - rho) <= 0.05
    assert fit.sample_count == len(s)
    assert fit.chaotic_fraction == pytest.approx(1.0 - fit.rho)


def test_fit_boundary_snap_is_two_sided():
    rng = np.random.default_rng(8)
    assert fit_rho(_wigner(4000, rng)).rho == 0.0
    assert fit_rho(_poisson(4000, rng)).rho == 1.0


def test_chaos_profile_windows(make_sector_spectra):
    from gethlab.fock import SECTOR_PAIR, SectorLabel

    levels = {
        str(lab): make_sector_spectra(90, lab).energies
        for lab in (SectorLabel(0, 1), SectorLabel(0, -1), SECTOR_PAIR)
    }
    profile = chaos_profile(levels, 90, window_width=0.3)
    assert profile
    for e, frac, count in profile:
        assert 0.0 <= frac <= 1.0
        assert count >= MIN_LEVELS
    centers = [e for e, _, _ in profile]
    assert centers == sorted(centers)
