"""Fock basis and D3 symmetry machinery for the three-site bosonic trimer.

States are occupation triples (n1, n2, n3) at fixed total particle number N.
The dihedral group D3 is generated by the cyclic site rotation
R: (n1, n2, n3) -> (n3, n1, n2) and the reflection S: (n1, n2, n3) -> (n3, n2, n1).
Sector bases diagonalize R; the two complex-eigenvalue sectors are related by
complex conjugation, which is enforced by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp

OMEGA = np.exp(2j * np.pi / 3)

#: rotation eigenvalues indexed by r_index
ROTATION_EIGENVALUES = (1.0 + 0.0j, OMEGA, OMEGA.conjugate())


def basis_dimension(n_particles: int) -> int:
    """Number of three-site Fock states with total occupation n_particles."""
    return (n_particles + 1) * (n_particles + 2) // 2


@dataclass(frozen=True, order=True)
class SectorLabel:
    """Rotation sector, optionally refined by reflection parity (r = 1 only).

    r_index is 0, 1 or 2 for rotation eigenvalue exp(2*pi*i*r_index/3);
    s is +1 or -1 and may only be set when r_index == 0, since S does not
    commute with R in the complex sectors.
    """

    r_index: int
    s: int | None = None

    def __post_init__(self):
        if self.r_index not in (0, 1, 2):
            raise ValueError(f"r_index must be 0, 1 or 2, got {self.r_index}")
        if self.s is not None:
            if self.r_index != 0:
                raise ValueError("reflection parity is only defined in the r=1 sector")
            if self.s not in (-1, 1):
                raise ValueError(f"s must be +1 or -1, got {self.s}")

    @property
    def r(self) -> complex:
        return ROTATION_EIGENVALUES[self.r_index]

    def __str__(self):
        tag = f"r{self.r_index}"
        if self.s is not None:
            tag += "sp" if self.s > 0 else "sm"
        return tag


SECTOR_R1 = SectorLabel(0)
SECTOR_PAIR = SectorLabel(1)
SECTOR_PAIR_CONJ = SectorLabel(2)


def enumerate_basis(n_particles: int) -> list[tuple[int, int, int]]:
    """All (n1, n2, n3) with n1+n2+n3 = n_particles, lexicographically descending.

    The first state is (N, 0, 0) and the last (0, 0, N); this order is the
    canonical index used everywhere (caches, sector bases, tests).
    """
    if n_particles < 1:
        raise ValueError("need at least one particle")
    states = []
    for n1 in range(n_particles, -1, -1):
        for n2 in range(n_particles - n1, -1, -1):
            states.append((n1, n2, n_particles - n1 - n2))
    return states


def apply_rotation(state: tuple[int, int, int]) -> tuple[int, int, int]:
    """Cyclic rotation R: site contents shift 1 -> 2 -> 3 -> 1."""
    n1, n2, n3 = state
    return (n3, n1, n2)


def apply_reflection(state: tuple[int, int, int]) -> tuple[int, int, int]:
    """Reflection S: swap sites 1 and 3."""
    n1, n2, n3 = state
    return (n3, n2, n1)


@lru_cache(maxsize=32)
def _basis_and_index(n_particles: int):
    states = enumerate_basis(n_particles)
    index = {s: i for i, s in enumerate(states)}
    return states, index


def rotation_permutation(n_particles: int) -> np.ndarray:
    """perm[i] = canonical index of R applied to state i."""
    states, index = _basis_and_index(n_particles)
    return np.array([index[apply_rotation(s)] for s in states], dtype=np.int64)


def reflection_permutation(n_particles: int) -> np.ndarray:
    """perm[i] = canonical index of S applied to state i."""
    states, index = _basis_and_index(n_particles)
    return np.array([index[apply_reflection(s)] for s in states], dtype=np.int64)


def permutation_matrix(perm: np.ndarray) -> sp.csr_matrix:
    """Sparse matrix P with P[perm[i], i] = 1 (operator convention)."""
    dim = len(perm)
    return sp.csr_matrix(
        (np.ones(dim), (perm, np.arange(dim))), shape=(dim, dim)
    )


def rotation_orbits(n_particles: int) -> list[tuple[int, ...]]:
    """Rotation orbits as index tuples (i, Ri, RRi) starting at the representative.

    The representative is the orbit member with the largest canonical index,
    which pins the global phase of every sector vector. Orbits of size 1
    (n1 = n2 = n3, possible only when 3 | N) are returned as 1-tuples.
    Orbits are listed by ascending representative index.
    """
    perm = rotation_permutation(n_particles)
    dim = len(perm)
    seen = np.zeros(dim, dtype=bool)
    orbits = []
    for i in range(dim):
        if seen[i]:
            continue
        members = [i]
        j = perm[i]
        while j != i:
            members.append(int(j))
            seen[j] = True
            j = perm[j]
        seen[i] = True
        # rotate the cycle so it starts at the largest index
        k = members.index(max(members))
        orbits.append(tuple(members[k:] + members[:k]))
    orbits.sort(key=lambda orb: orb[0])
    return orbits


@dataclass(frozen=True)
class SectorBasis:
    """Orthonormal rotation-adapted basis as a sparse (fock_dim x dim) matrix.

    Columns are unit vectors over the canonical Fock basis, each an eigenvector
    of R with the sector's eigenvalue. The r = e^{4 pi i/3} basis is the
    entrywise conjugate of the r = e^{2 pi i/3} basis, never an independent
    projection, so downstream doublet degeneracy is exact.
    """

    n_particles: int
    label: SectorLabel
    matrix: sp.csc_matrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def expand(self, coeffs: np.ndarray) -> np.ndarray:
        """Lift sector-basis coefficient vectors to the full Fock basis."""
        return self.matrix @ coeffs


def build_sector_basis(n_particles: int, label: SectorLabel) -> SectorBasis:
    """Build the symmetry-adapted basis for one sector label.

    Each size-3 rotation orbit with representative t contributes the vector
    (|t> + conj(r)|Rt> + conj(r)^2 |RRt>) / sqrt(3); fixed points contribute
    only to r = 1. For r = 1 with a reflection parity requested, orbit vectors
    are combined into S eigenvectors (S permutes the r = 1 orbit vectors).
    An empty sector yields an empty basis.
    """
    fock_dim = basis_dimension(n_particles)
    orbits = rotation_orbits(n_particles)

    if label.r_index == 2:
        base = build_sector_basis(n_particles, SectorLabel(1))
        return SectorBasis(n_particles, label, base.matrix.conjugate())

    rows, cols, vals = [], [], []
    col = 0
    kept_orbits = []
    if label.r_index == 0:
        phase = np.array([1.0, 1.0, 1.0], dtype=complex) / np.sqrt(3.0)
    else:
        rbar = np.conjugate(ROTATION_EIGENVALUES[label.r_index])
        phase = np.array([1.0, rbar, rbar**2], dtype=complex) / np.sqrt(3.0)
    for orb in orbits:
        if len(orb) == 1:
            if label.r_index == 0:
                rows.append(orb[0])
                cols.append(col)
                vals.append(1.0 + 0.0j)
                kept_orbits.append(orb)
                col += 1
            continue
        for k, idx in enumerate(orb):
            rows.append(idx)
            cols.append(col)
            vals.append(phase[k])
        kept_orbits.append(orb)
        col += 1

    matrix = sp.csc_matrix(
        (np.array(vals), (rows, cols)), shape=(fock_dim, col), dtype=complex
    )
    if label.s is None:
        return SectorBasis(n_particles, label, matrix)

    # refine r = 1 by reflection parity: S maps each orbit vector to the orbit
    # vector of the reflected representative, i.e. it permutes columns.
    _, index = _basis_and_index(n_particles)
    states, _ = _basis_and_index(n_particles)
    orbit_of_index = {}
    for oi, orb in enumerate(kept_orbits):
        for idx in orb:
            orbit_of_index[idx] = oi
    partner = np.empty(len(kept_orbits), dtype=np.int64)
    for oi, orb in enumerate(kept_orbits):
        refl = index[apply_reflection(states[orb[0]])]
        partner[oi] = orbit_of_index[refl]

    dense_cols = []
    for oi in range(len(kept_orbits)):
        pj = partner[oi]
        if pj == oi:
            if label.s == 1:
                dense_cols.append(matrix[:, oi])
        elif pj > oi:
            u = matrix[:, oi]
            v = matrix[:, pj]
            if label.s == 1:
                dense_cols.append((u + v) / np.sqrt(2.0))
            else:
                dense_cols.append((u - v) / np.sqrt(2.0))
    if dense_cols:
        refined = sp.hstack(dense_cols, format="csc")
    else:
        refined = sp.csc_matrix((fock_dim, 0), dtype=complex)
    return SectorBasis(n_particles, label, refined)


def all_sector_bases(n_particles: int) -> dict[SectorLabel, SectorBasis]:
    """The three rotation-sector bases (no reflection refinement)."""
    return {
        lab: build_sector_basis(n_particles, lab)
        for lab in (SECTOR_R1, SECTOR_PAIR, SECTOR_PAIR_CONJ)
    }
