"""Shared fixtures: one spectrum/table build per particle number per session."""

from __future__ import annotations

import pytest

from gethlab import observables, spectra
from gethlab.fock import SECTOR_PAIR, SECTOR_R1, build_sector_basis
from gethlab.spectra import ModelParams


@pytest.fixture(scope="session")
def make_tables():
    """Factory returning (subspace_set, {kind: table}) for a particle number.

    Results are memoized for the whole session because the larger
    diagonalizations dominate the suite's runtime.
    """
    memo = {}

    def build(n: int):
        if n in memo:
            return memo[n]
        params = ModelParams(n)
        basis_r1 = build_sector_basis(n, SECTOR_R1)
        basis_pair = build_sector_basis(n, SECTOR_PAIR)
        spec_r1 = spectra.diagonalize_sector(
            spectra.build_hamiltonian(params, basis_r1), SECTOR_R1
        )
        spec_pair = spectra.diagonalize_sector(
            spectra.build_hamiltonian(params, basis_pair), SECTOR_PAIR
        )
        subs = spectra.assemble_subspaces(params, spec_r1, spec_pair)
        tables = {
            kind: observables.project_all(kind, subs, basis_pair, basis_r1)
            for kind in observables.KINDS
        }
        memo[n] = (subs, tables)
        return memo[n]

    return build


@pytest.fixture(scope="session")
def make_sector_spectra():
    """Factory for raw per-sector spectra, memoized per (n, label)."""
    memo = {}

    def build(n: int, label):
        key = (n, label)
        if key not in memo:
            params = ModelParams(n)
            basis = build_sector_basis(n, label)
            memo[key] = spectra.diagonalize_sector(
                spectra.build_hamiltonian(params, basis), label
            )
        return memo[key]

    return build
