"""Observable matrices and degenerate-subspace projections."""

import numpy as np
import pytest

from gethlab import observables
from gethlab.fock import (
    SECTOR_PAIR,
    SECTOR_R1,
    build_sector_basis,
    enumerate_basis,
    permutation_matrix,
    reflection_permutation,
)
from gethlab.observables import (
    KINDS,
    build_observable,
    lambda_cloud,
    project_all,
    project_observable,
    spectral_width,
)
from gethlab.spectra import EnergyShell


def test_spectral_widths():
    # [TRIVIAL] classical ranges of the three intensive observables
    assert spectral_width("hopping12") == 2.0
    assert spectral_width("current") == pytest.approx(2.0 * np.sqrt(3.0))
    assert spectral_width("imbalance") == 1.0
    with pytest.raises(KeyError):
        spectral_width("nope")
    with pytest.raises(ValueError):
        build_observable("nope", 3)


def test_current_single_particle_eigenvalues():
    # [DERIVED] plane waves carry current (2/sqrt(3)) sin(2 pi k/3) * sqrt(3):
    # for N=1 the intensive current eigenvalues are 0 and +-sqrt(3)
    c = build_observable("current", 1).toarray()
    ev = np.sort(np.linalg.eigvalsh(c))
    assert np.allclose(ev, [-np.sqrt(3.0), 0.0, np.sqrt(3.0)], atol=1e-12)


def test_hopping12_matrix_elements():
    # [DERIVED] hand-computed bosonic matrix element sqrt(n2 (n1+1)) / N
    n = 3
    states = enumerate_basis(n)
    h = build_observable("hopping12", n).toarray()
    i = states.index((1, 2, 0))
    j = states.index((2, 1, 0))
    assert h[j, i] == pytest.approx(np.sqrt(2 * 2) / 3)
    assert np.abs(h - h.conj().T).max() == 0.0


def test_imbalance_diagonal_and_nonhermitian():
    n = 4
    states = enumerate_basis(n)
    m = build_observable("imbalance", n).toarray()
    omega = np.exp(2j * np.pi / 3)
    for i, st in enumerate(states):
        assert m[i, i] == pytest.approx((st[0] + omega * st[1] + omega**2 * st[2]) / n)
    assert np.abs(m - m.conj().T).max() > 0.1


def test_current_antisymmetric_under_reflection():
    # S reverses the loop direction, so S C S = -C
    n = 5
    s = permutation_matrix(reflection_permutation(n)).toarray()
    c = build_observable("current", n).toarray()
    assert np.abs(s @ c @ s + c).max() <= 1e-12


def _brute_projection(kind, subspace, basis_pair, basis_r1, n):
    """Oracle: explicit member expansion and dense sandwiching."""
    op = build_observable(kind, n).toarray()
    u = basis_pair.matrix.toarray() @ subspace.pair_vector
    w = basis_r1.matrix.toarray() @ subspace.r1_vector
    members = np.stack([u, u.conj(), w], axis=1)
    return members.conj().T @ op @ members


@pytest.mark.parametrize("kind", KINDS)
def test_projection_against_brute_force(kind, make_tables):
    # [DERIVED] dense-matrix oracle at N=4
    n = 4
    subs, tables = make_tables(n)
    basis_r1 = build_sector_basis(n, SECTOR_R1)
    basis_pair = build_sector_basis(n, SECTOR_PAIR)
    for i, s in enumerate(subs.subspaces):
        ref = _brute_projection(kind, s, basis_pair, basis_r1, n)
        assert np.abs(tables[kind].matrices[i] - ref).max() <= 1e-12
        single = project_observable(kind, s, basis_pair, basis_r1, n)
        assert np.abs(single.matrix - ref).max() <= 1e-12


@pytest.mark.parametrize("kind", ("imbalance", "current"))
def test_order_parameter_traces_vanish(kind, make_tables):
    # per-subspace trace of both order parameters is exactly protected to zero
    _, tables = make_tables(12)
    assert np.abs(tables[kind].traces).max() <= 1e-10


def test_eigenvalue_sum_equals_trace(make_tables):
    _, tables = make_tables(12)
    for kind in KINDS:
        t = tables[kind]
        assert np.abs(t.eigenvalues.sum(axis=1) - t.traces).max() <= 1e-10


def test_hermitian_kinds_have_real_eigenvalues(make_tables):
    _, tables = make_tables(12)
    for kind in ("hopping12", "current"):
        assert np.abs(tables[kind].eigenvalues.imag).max() <= 1e-12


def test_lambda_cloud_shell_filter(make_tables):
    _, tables = make_tables(12)
    t = tables["imbalance"]
    shell = EnergyShell(-2.5, 0.5)
    cloud = lambda_cloud(t, shell)
    assert cloud
    for e, lam in cloud:
        assert abs(e + 2.5) <= 0.5
        assert lam.shape == (3,)
    assert len(lambda_cloud(t)) == len(t)
