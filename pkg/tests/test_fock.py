"""Symmetry group, canonical basis, and sector construction."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gethlab import fock
from gethlab.fock import (
    SECTOR_PAIR,
    SECTOR_PAIR_CONJ,
    SECTOR_R1,
    SectorLabel,
    all_sector_bases,
    apply_reflection,
    apply_rotation,
    basis_dimension,
    build_sector_basis,
    enumerate_basis,
    permutation_matrix,
    reflection_permutation,
    rotation_orbits,
    rotation_permutation,
)


def test_basis_enumeration_order():
    # [TRIVIAL] descending lexicographic order, first state (N,0,0)
    states = enumerate_basis(3)
    assert states[0] == (3, 0, 0)
    assert states == sorted(states, reverse=True)
    assert len(states) == basis_dimension(3) == 10
    assert all(sum(s) == 3 for s in states)


@given(st.integers(1, 12))
def test_dimension_formula(n):
    # [TRIVIAL] triangular number of occupation triples
    assert len(enumerate_basis(n)) == (n + 1) * (n + 2) // 2


@settings(max_examples=50)
@given(st.integers(1, 20), st.integers(0, 400))
def test_group_action_on_states(n, k):
    states = enumerate_basis(n)
    s = states[k % len(states)]
    # [TRIVIAL] R^3 = id, S^2 = id, SRS = R^2 acting on occupation triples
    r3 = apply_rotation(apply_rotation(apply_rotation(s)))
    assert r3 == s
    assert apply_reflection(apply_reflection(s)) == s
    srs = apply_reflection(apply_rotation(apply_reflection(s)))
    r2 = apply_rotation(apply_rotation(s))
    assert srs == r2


@pytest.mark.parametrize("n", range(1, 13))
def test_permutation_matrix_relations(n):
    # exhaustive D3 relations on the matrix representation
    r = permutation_matrix(rotation_permutation(n)).toarray()
    s = permutation_matrix(reflection_permutation(n)).toarray()
    eye = np.eye(len(r))
    assert np.array_equal(r @ r @ r, eye)
    assert np.array_equal(s @ s, eye)
    assert np.array_equal(s @ r @ s, r @ r)


def test_orbit_structure_n3():
    # [DERIVED] brute-force orbit enumeration of the 10 occupation states of
    # N=3: (1,1,1) is fixed, the rest split into 3 orbits of size 3
    orbits = rotation_orbits(3)
    sizes = sorted(len(o) for o in orbits)
    assert sizes == [1, 3, 3, 3]
    states = enumerate_basis(3)
    fixed = [o for o in orbits if len(o) == 1]
    assert states[fixed[0][0]] == (1, 1, 1)


def test_orbit_representative_convention():
    # the stored representative is the member with the largest canonical index
    for n in (3, 5, 6):
        for orbit in rotation_orbits(n):
            assert orbit[0] == max(orbit)


@pytest.mark.parametrize("n", range(1, 13))
def test_sector_bases_unitary_complete(n):
    bases = all_sector_bases(n)
    stack = np.hstack([bases[lab].matrix.toarray() for lab in bases])
    dim = basis_dimension(n)
    assert stack.shape == (dim, dim)
    gram = stack.conj().T @ stack
    assert np.abs(gram - np.eye(dim)).max() <= 1e-10


@pytest.mark.parametrize("n", range(1, 13))
def test_sector_vectors_are_eigenvectors(n):
    r = permutation_matrix(rotation_permutation(n))
    for lab, basis in all_sector_bases(n).items():
        b = basis.matrix.toarray()
        assert np.abs(r @ b - lab.r * b).max() <= 1e-12


def test_conjugate_sector_is_entrywise_conjugate():
    # [TRIVIAL] by construction
    for n in (2, 5, 7):
        pair = build_sector_basis(n, SECTOR_PAIR).matrix.toarray()
        conj = build_sector_basis(n, SECTOR_PAIR_CONJ).matrix.toarray()
        assert np.array_equal(conj, pair.conj())


def test_sector_dimensions_n3():
    # [DERIVED] orbit count: 4 orbits, one fixed point restricted to r=1
    dims = {str(lab): b.matrix.shape[1] for lab, b in all_sector_bases(3).items()}
    assert dims == {"r0": 4, "r1": 3, "r2": 3}


def test_n1_r1_vector():
    # [TRIVIAL] single orbit, so the r=1 sector is (1,1,1)/sqrt(3)
    b = build_sector_basis(1, SECTOR_R1).matrix.toarray()
    assert b.shape == (3, 1)
    assert np.allclose(np.abs(b[:, 0]), 1 / np.sqrt(3))


@pytest.mark.parametrize("n", range(1, 10))
def test_reflection_refined_sectors(n):
    # s-refined r=1 vectors are reflection eigenvectors and span the sector
    s = permutation_matrix(reflection_permutation(n))
    total = 0
    for parity in (1, -1):
        basis = build_sector_basis(n, SectorLabel(0, parity)).matrix.toarray()
        if basis.shape[1]:
            assert np.abs(s @ basis - parity * basis).max() <= 1e-12
        total += basis.shape[1]
    assert total == build_sector_basis(n, SECTOR_R1).matrix.shape[1]


def test_invalid_labels():
    with pytest.raises(ValueError):
        SectorLabel(3)
    with pytest.raises(ValueError):
        SectorLabel(1, 1)      # parity refinement only exists in r=1
    with pytest.raises(ValueError):
        SectorLabel(0, 2)
