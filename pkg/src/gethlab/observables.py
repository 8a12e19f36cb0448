"""Intensive trimer observables and their degenerate-subspace projections.

Three observables, always divided by N so spectral widths are size-independent:

* hopping12:  (a+_1 a_2 + a+_2 a_1)/N, Hermitian
* current:    i sum_j (a+_{j+1} a_j - a+_j a_{j+1})/N, Hermitian
* imbalance:  (n_1 + w n_2 + w^2 n_3)/N with w = e^{2 pi i/3}, non-Hermitian

Projecting an observable into a degenerate subspace gives a 3x3 matrix whose
eigenvalues and trace drive the deviation statistics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fock import OMEGA, SectorBasis, enumerate_basis
from .spectra import DegenerateSubspace, SubspaceSet

KINDS = ("hopping12", "current", "imbalance")

#: full classical ranges; used as the deviation normalization eta
SPECTRAL_WIDTHS = {
    "hopping12": 2.0,
    "current": 2.0 * np.sqrt(3.0),
    "imbalance": 1.0,
}

HERMITIAN = {"hopping12": True, "current": True, "imbalance": False}


def spectral_width(kind: str) -> float:
    """Fixed normalization constant eta for the given observable."""
    return SPECTRAL_WIDTHS[kind]


def build_observable(kind: str, n_particles: int) -> sp.csr_matrix:
    """Sparse matrix of the intensive observable over the canonical Fock basis."""
    if kind not in KINDS:
        raise ValueError(f"unknown observable kind {kind!r}")
    states = enumerate_basis(n_particles)
    index = {s: i for i, s in enumerate(states)}
    dim = len(states)
    rows, cols, vals = [], [], []

    if kind == "imbalance":
        diag = np.array(
            [(st[0] + OMEGA * st[1] + OMEGA**2 * st[2]) / n_particles for st in states]
        )
        return sp.diags(diag).tocsr()

    for i, st in enumerate(states):
        if kind == "hopping12":
            # a+_1 a_2 moves one particle from site 2 to site 1
            if st[1] > 0:
                dst = (st[0] + 1, st[1] - 1, st[2])
                amp = np.sqrt(st[1] * (st[0] + 1)) / n_particles
                ii = index[dst]
                rows.extend((ii, i))
                cols.extend((i, ii))
                vals.extend((amp, amp))
        else:  # current
            for j in range(3):
                k = (j + 1) % 3
                # i a+_{j+1} a_j : site j -> j+1 with phase +i; h.c. partner -i
                if st[j] > 0:
                    dst = list(st)
                    dst[j] -= 1
                    dst[k] += 1
                    amp = np.sqrt(st[j] * (st[k] + 1)) / n_particles
                    ii = index[tuple(dst)]
                    rows.extend((ii, i))
                    cols.extend((i, ii))
                    vals.extend((1j * amp, -1j * amp))
    return sp.csr_matrix((np.array(vals), (rows, cols)), shape=(dim, dim))


@dataclass(frozen=True)
class ProjectedObservable:
    """3x3 block of one observable inside one degenerate subspace."""

    subspace_index: int
    kind: str
    matrix: np.ndarray
    eigenvalues: np.ndarray
    trace: complex


@dataclass(frozen=True)
class ProjectionTable:
    """Per-subspace projections for one observable over a whole subspace set.

    Member order in every 3x3 block: (doublet vector, conjugate doublet
    vector, r = 1 vector).
    """

    kind: str
    energies_per_particle: np.ndarray     # (n,)
    matrices: np.ndarray                  # (n, 3, 3) complex
    eigenvalues: np.ndarray               # (n, 3) complex
    traces: np.ndarray                    # (n,) complex

    def __len__(self):
        return len(self.traces)


def _expand_members(
    subs: list[DegenerateSubspace],
    basis_pair: SectorBasis,
    basis_r1: SectorBasis,
):
    """Full-Fock member vectors as columns: doublet U, its conjugate, r=1 W."""
    if not subs:
        fd = basis_r1.matrix.shape[0]
        z = np.zeros((fd, 0), dtype=complex)
        return z, z, z
    pair_mat = np.stack([s.pair_vector for s in subs], axis=1)
    r1_mat = np.stack([s.r1_vector for s in subs], axis=1)
    u = basis_pair.matrix @ pair_mat
    w = basis_r1.matrix @ r1_mat
    return u, u.conj(), w


def project_observable(
    kind_or_matrix,
    subspace: DegenerateSubspace,
    basis_pair: SectorBasis,
    basis_r1: SectorBasis,
    n_particles: int | None = None,
) -> ProjectedObservable:
    """Project one observable into a single subspace (convenience wrapper)."""
    if isinstance(kind_or_matrix, str):
        kind = kind_or_matrix
        op = build_observable(kind, n_particles or basis_r1.n_particles)
    else:
        kind = "custom"
        op = kind_or_matrix
    u, uc, w = _expand_members([subspace], basis_pair, basis_r1)
    members = np.hstack([u, uc, w])
    mat = members.conj().T @ (op @ members)
    eig, tr = _eigs_and_trace(mat[None, :, :], HERMITIAN.get(kind, False))
    return ProjectedObservable(subspace.index, kind, mat, eig[0], tr[0])


def _eigs_and_trace(mats: np.ndarray, hermitian: bool):
    traces = np.trace(mats, axis1=1, axis2=2)
    if hermitian:
        herm_dev = np.abs(mats - mats.conj().transpose(0, 2, 1)).max(initial=0.0)
        if herm_dev > 1e-10:
            raise ValueError(f"projected block not Hermitian (residual {herm_dev:.2e})")
        eig = np.linalg.eigvalsh(mats).astype(complex)
    else:
        eig = np.linalg.eigvals(mats) if len(mats) else np.zeros((0, 3), complex)
    return eig, traces


def project_all(
    kind: str,
    subspace_set: SubspaceSet,
    basis_pair: SectorBasis,
    basis_r1: SectorBasis,
    chunk: int = 512,
) -> ProjectionTable:
    """Project one observable into every subspace, chunked for memory."""
    n = subspace_set.params.n_particles
    op = build_observable(kind, n)
    subs = subspace_set.subspaces
    count = len(subs)
    mats = np.empty((count, 3, 3), dtype=complex)
    for start in range(0, count, chunk):
        block = subs[start : start + chunk]
        u, uc, w = _expand_members(block, basis_pair, basis_r1)
        members = (u, uc, w)
        images = [op @ m for m in members]
        for a in range(3):
            for b in range(3):
                mats[start : start + len(block), a, b] = np.einsum(
                    "ij,ij->j", members[a].conj(), images[b]
                )
    eig, traces = _eigs_and_trace(mats, HERMITIAN[kind])
    return ProjectionTable(
        kind=kind,
        energies_per_particle=subspace_set.energies_per_particle(),
        matrices=mats,
        eigenvalues=eig,
        traces=traces,
    )


def lambda_cloud(
    table: ProjectionTable, shell=None
) -> list[tuple[float, np.ndarray]]:
    """Per-subspace eigenvalue multisets, optionally restricted to a shell."""
    out = []
    for e, lam in zip(table.energies_per_particle, table.eigenvalues):
        if shell is not None and abs(e - shell.center) > shell.halfwidth:
            continue
        out.append((float(e), lam.copy()))
    return out
