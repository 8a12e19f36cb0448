"""Trimer Hamiltonian, per-sector spectra, and degenerate-subspace assembly.

The Hamiltonian is

    H = sum_i [ -J (a+_{i+1} a_i + a_{i+1} a+_i) + (U/N) n_i (n_i - 1) ]

with periodic site indices. It commutes with the rotation R, so it block
diagonalizes over the sector bases from :mod:`gethlab.fock`. The two complex
rotation sectors are exactly degenerate; each of their doublets, together with
the nearest r = 1 level, spans one three-dimensional degenerate subspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .fock import (
    SECTOR_PAIR,
    SECTOR_PAIR_CONJ,
    SECTOR_R1,
    SectorBasis,
    SectorLabel,
    enumerate_basis,
)


class EigensolverError(RuntimeError):
    """Dense eigendecomposition failed; the message names the sector."""


@dataclass(frozen=True)
class ModelParams:
    """Particle number and couplings; J and U in the same energy units."""

    n_particles: int
    hopping: float = 1.0
    interaction: float = -5.0

    def __post_init__(self):
        if self.n_particles < 1:
            raise ValueError("n_particles must be >= 1")
        if not (np.isfinite(self.hopping) and np.isfinite(self.interaction)):
            raise ValueError("couplings must be finite")


def build_hamiltonian(params: ModelParams, basis: SectorBasis | None = None):
    """Hamiltonian matrix over the full Fock basis (sparse) or one sector (dense).

    For a sector basis the returned matrix is B^dagger H B; the r = 1 block is
    real symmetric and returned as float64 so the real eigensolver applies.
    """
    n = params.n_particles
    states = enumerate_basis(n)
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)

    rows, cols, vals = [], [], []
    u_over_n = params.interaction / n
    for i, st in enumerate(states):
        diag = u_over_n * sum(m * (m - 1) for m in st)
        rows.append(i)
        cols.append(i)
        vals.append(diag)
        # hopping a+_{j+1} a_j moves one particle from site j to site j+1
        for j in range(3):
            k = (j + 1) % 3
            if st[j] > 0:
                dst = list(st)
                dst[j] -= 1
                dst[k] += 1
                amp = -params.hopping * np.sqrt(st[j] * (st[k] + 1))
                ii = index[tuple(dst)]
                rows.extend((ii, i))
                cols.extend((i, ii))
                vals.extend((amp, amp))
    h_full = sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim))
    if basis is None:
        return h_full
    if basis.n_particles != n:
        raise ValueError("sector basis built for a different particle number")
    block = (basis.matrix.conjugate().T @ (h_full @ basis.matrix)).toarray()
    if basis.label.r_index == 0:
        return np.ascontiguousarray(block.real)
    return block


@dataclass(frozen=True)
class SectorSpectrum:
    """Ascending eigenvalues and eigenvectors (columns, sector-basis coords)."""

    label: SectorLabel
    energies: np.ndarray
    eigenvectors: np.ndarray


def diagonalize_sector(h_sector: np.ndarray, label: SectorLabel) -> SectorSpectrum:
    """Full dense eigendecomposition of one sector block."""
    try:
        energies, vectors = scipy.linalg.eigh(h_sector)
    except scipy.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed in sector {label}") from exc
    return SectorSpectrum(label, energies, vectors)


def conjugate_spectrum(spec: SectorSpectrum) -> SectorSpectrum:
    """The r = e^{4 pi i/3} spectrum: conjugated eigenvectors, copied energies."""
    if spec.label != SECTOR_PAIR:
        raise ValueError("conjugation is defined from the r = e^{2 pi i/3} sector")
    return SectorSpectrum(SECTOR_PAIR_CONJ, spec.energies, spec.eigenvectors.conj())


def sector_spectra(
    params: ModelParams, bases: dict[SectorLabel, SectorBasis]
) -> dict[SectorLabel, SectorSpectrum]:
    """Diagonalize the r=1 and r=e^{2 pi i/3} blocks; derive the third sector."""
    out = {}
    for lab in (SECTOR_R1, SECTOR_PAIR):
        block = build_hamiltonian(params, bases[lab])
        out[lab] = diagonalize_sector(block, lab)
    out[SECTOR_PAIR_CONJ] = conjugate_spectrum(out[SECTOR_PAIR])
    return out


@dataclass(frozen=True)
class DegenerateSubspace:
    """One d_n = 3 subspace: exact conjugate doublet plus nearest r = 1 level.

    Member vectors are kept in sector coordinates; the conjugate-sector member
    is the entrywise conjugate of pair_vector expanded with the conjugate basis
    and is therefore not stored.
    """

    index: int
    energy: float               # mean of the three member energies
    doublet_energy: float
    r1_energy: float
    pairing_residual: float     # |E_doublet - E_{r=1}|
    pair_vector: np.ndarray
    r1_vector: np.ndarray

    @property
    def dim(self) -> int:
        return 3


@dataclass(frozen=True)
class SubspaceSet:
    """Assembled subspaces plus bookkeeping for the unpaired r = 1 levels."""

    params: ModelParams
    subspaces: list[DegenerateSubspace]
    unpaired_r1: np.ndarray = field(default_factory=lambda: np.array([], dtype=int))

    def __len__(self):
        return len(self.subspaces)

    def energies_per_particle(self) -> np.ndarray:
        return np.array([s.energy for s in self.subspaces]) / self.params.n_particles


class _NearestAvailable:
    """Nearest not-yet-used index in a sorted level list, with removal.

    Two path-compressed jump arrays: one pointing right to the next available
    index, one pointing left. Amortized near-O(1) per query.
    """

    def __init__(self, n: int):
        self.n = n
        self._right = list(range(n + 1))          # sentinel n = exhausted
        self._left = list(range(-1, n))           # stored at offset +1; -1 = none

    def _find_right(self, i: int) -> int:
        r = self._right
        root = i
        while r[root] != root:
            root = r[root]
        while r[i] != root:
            r[i], i = root, r[i]
        return root

    def _find_left(self, i: int) -> int:
        if i < 0:
            return -1
        l = self._left
        root = i
        while l[root + 1] != root:
            root = l[root + 1]
            if root < 0:
                break
        j = i
        while j >= 0 and l[j + 1] != root:
            l[j + 1], j = root, l[j + 1]
        return root

    def nearest(self, levels: np.ndarray, value: float) -> int | None:
        pos = int(np.searchsorted(levels, value))
        cand_r = self._find_right(min(pos, self.n))
        cand_l = self._find_left(pos - 1)
        best = None
        if cand_r < self.n:
            best = cand_r
        if cand_l >= 0 and (
            best is None or abs(levels[cand_l] - value) < abs(levels[best] - value)
        ):
            best = cand_l
        return best

    def remove(self, i: int):
        self._right[i] = i + 1
        self._left[i + 1] = i - 1


def assemble_subspaces(
    params: ModelParams, spec_r1: SectorSpectrum, spec_pair: SectorSpectrum
) -> SubspaceSet:
    """Match each doublet to the nearest unused r = 1 level, ascending in energy.

    Matching is injective (no r = 1 level is reused) so the subspaces are
    disjoint; leftover r = 1 levels are reported, not silently dropped.
    """
    e_pair = spec_pair.energies
    e_r1 = spec_r1.energies
    n_pair, n_r1 = len(e_pair), len(e_r1)
    if n_pair == 0:
        return SubspaceSet(params, [], np.arange(n_r1))

    pool = _NearestAvailable(n_r1)
    used = np.zeros(n_r1, dtype=bool)
    subspaces = []
    for k in range(n_pair):
        best = pool.nearest(e_r1, e_pair[k])
        if best is None:
            raise RuntimeError("ran out of r=1 levels while pairing doublets")
        pool.remove(best)
        used[best] = True
        e_d = float(e_pair[k])
        e_1 = float(e_r1[best])
        subspaces.append(
            DegenerateSubspace(
                index=k,
                energy=(2.0 * e_d + e_1) / 3.0,
                doublet_energy=e_d,
                r1_energy=e_1,
                pairing_residual=abs(e_d - e_1),
                pair_vector=spec_pair.eigenvectors[:, k],
                r1_vector=spec_r1.eigenvectors[:, best],
            )
        )

    subspaces.sort(key=lambda s: s.energy)
    return SubspaceSet(params, subspaces, np.nonzero(~used)[0])


@dataclass(frozen=True)
class EnergyShell:
    """Shell |E_n / N - center| <= halfwidth, both per particle."""

    center: float
    halfwidth: float

    def __post_init__(self):
        if self.halfwidth <= 0:
            raise ValueError("halfwidth must be positive")


def select_shell(subs: SubspaceSet, shell: EnergyShell) -> list[DegenerateSubspace]:
    """Subspaces whose mean energy per particle falls inside the shell."""
    n = subs.params.n_particles
    return [
        s
        for s in subs.subspaces
        if abs(s.energy / n - shell.center) <= shell.halfwidth
    ]
