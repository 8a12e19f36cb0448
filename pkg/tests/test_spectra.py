"""Hamiltonian blocks, sector spectra, and degenerate-subspace assembly."""

import numpy as np
import pytest

from gethlab import spectra
from gethlab.fock import SECTOR_PAIR, SECTOR_R1, all_sector_bases, enumerate_basis
from gethlab.spectra import (
    DegenerateSubspace,
    EnergyShell,
    ModelParams,
    SubspaceSet,
    assemble_subspaces,
    build_hamiltonian,
    conjugate_spectrum,
    diagonalize_sector,
    sector_spectra,
    select_shell,
)


def _full_spectrum(params):
    """Oracle: dense diagonalization of the unprojected Fock-basis matrix."""
    h = build_hamiltonian(params).toarray()
    return np.linalg.eigvalsh(h)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0)
    with pytest.raises(ValueError):
        ModelParams(3, hopping=np.inf)


def test_n1_spectrum_analytic():
    # [DERIVED] single particle on a 3-ring: plane waves with E = -2J cos(2 pi k/3),
    # U term absent since n(n-1) = 0
    params = ModelParams(1, hopping=1.0, interaction=-5.0)
    ev = _full_spectrum(params)
    assert np.allclose(np.sort(ev), [-2.0, 1.0, 1.0], atol=1e-12)
    # the -2J level sits in r=1, the doublet at +J in the complex sectors
    specs = sector_spectra(params, all_sector_bases(1))
    assert np.allclose(specs[SECTOR_R1].energies, [-2.0])
    assert np.allclose(specs[SECTOR_PAIR].energies, [1.0])


def test_j0_diagonal():
    # [TRIVIAL] hopping off: H is diagonal with entries (U/N) sum n_i(n_i-1)
    params = ModelParams(3, hopping=0.0, interaction=-5.0)
    h = build_hamiltonian(params).toarray()
    assert np.abs(h - np.diag(np.diag(h))).max() == 0.0
    states = enumerate_basis(3)
    diag = {s: h[i, i] for i, s in enumerate(states)}
    assert diag[(3, 0, 0)] == pytest.approx(-10.0)
    assert diag[(2, 1, 0)] == pytest.approx(-10.0 / 3.0)
    assert diag[(1, 1, 1)] == pytest.approx(0.0)


@pytest.mark.parametrize("n", range(1, 11))
def test_sector_union_equals_full_spectrum(n):
    # [DERIVED] oracle is the brute-force full-basis diagonalization
    params = ModelParams(n)
    specs = sector_spectra(params, all_sector_bases(n))
    union = np.sort(np.concatenate([s.energies for s in specs.values()]))
    assert np.abs(union - _full_spectrum(params)).max() <= 1e-9


def test_r1_block_is_real():
    params = ModelParams(6)
    bases = all_sector_bases(6)
    block = build_hamiltonian(params, bases[SECTOR_R1])
    assert block.dtype == np.float64
    assert np.abs(block - block.T).max() <= 1e-12


def test_eigenvector_orthonormality():
    # [TRIVIAL] solver contract
    params = ModelParams(8)
    bases = all_sector_bases(8)
    spec = diagonalize_sector(build_hamiltonian(params, bases[SECTOR_PAIR]),
                              SECTOR_PAIR)
    v = spec.eigenvectors
    assert np.abs(v.conj().T @ v - np.eye(v.shape[1])).max() <= 1e-10


def test_conjugate_spectrum_bitwise():
    # [TRIVIAL] by construction
    params = ModelParams(5)
    bases = all_sector_bases(5)
    spec = diagonalize_sector(build_hamiltonian(params, bases[SECTOR_PAIR]),
                              SECTOR_PAIR)
    conj = conjugate_spectrum(spec)
    assert np.array_equal(conj.energies, spec.energies)
    assert np.array_equal(conj.eigenvectors, spec.eigenvectors.conj())
    with pytest.raises(ValueError):
        conjugate_spectrum(conj)


def test_assembly_properties(make_tables):
    subs, _ = make_tables(30)
    n_r1 = len(all_sector_bases(30)[SECTOR_R1].matrix.T.toarray())
    # injective matching: every r=1 level used at most once
    used = [s.r1_energy for s in subs.subspaces]
    assert len(subs) + len(subs.unpaired_r1) == n_r1
    # subspaces ascend in mean energy and all have dimension 3
    energies = [s.energy for s in subs.subspaces]
    assert energies == sorted(energies)
    assert all(s.dim == 3 for s in subs.subspaces)
    # the pairing residual is what it claims to be
    for s in subs.subspaces[:20]:
        assert s.pairing_residual == pytest.approx(abs(s.doublet_energy - s.r1_energy))


def test_assembly_nearest_no_replacement_oracle():
    # [DERIVED] oracle: greedy ascending sweep over explicit level lists
    e_pair = np.array([0.0, 0.99, 1.1, 5.0])
    e_r1 = np.array([-0.2, 0.95, 1.05, 1.2, 7.0])

    class _Spec:
        def __init__(self, e):
            self.energies = e
            self.eigenvectors = np.eye(len(e))

    subs = assemble_subspaces(ModelParams(4), _Spec(e_r1), _Spec(e_pair))
    matched = {s.doublet_energy: s.r1_energy for s in subs.subspaces}
    assert matched[0.0] == pytest.approx(-0.2)
    assert matched[0.99] == pytest.approx(0.95)
    assert matched[1.1] == pytest.approx(1.05)
    assert matched[5.0] == pytest.approx(7.0)
    assert list(subs.unpaired_r1) == [3]


def test_doublet_degeneracy_by_construction(make_tables):
    subs, _ = make_tables(30)
    # the conjugate member shares the stored doublet energy exactly, so the
    # only spread inside a subspace is the pairing residual
    for s in subs.subspaces:
        assert s.energy == pytest.approx((2 * s.doublet_energy + s.r1_energy) / 3)


def test_energy_shell_selection(make_tables):
    subs, _ = make_tables(30)
    shell = EnergyShell(-2.7, 0.4)
    inside = select_shell(subs, shell)
    n = subs.params.n_particles
    assert inside
    for s in inside:
        assert abs(s.energy / n + 2.7) <= 0.4
    outside = [s for s in subs.subspaces if s not in inside]
    for s in outside:
        assert abs(s.energy / n + 2.7) > 0.4
    with pytest.raises(ValueError):
        EnergyShell(-2.7, 0.0)
