"""Versioned binary cache for sector eigendecompositions.

Layout (little-endian):

    magic    8 bytes   b"GETHSPEC"
    version  uint32
    n        uint32    particle number
    hopping  float64
    interaction float64
    sector   uint32    code from SECTOR_CODES
    dim      uint32    sector dimension (= number of levels)

followed by dim float64 energies and dim*dim complex128 eigenvector entries
in column order. A file with a bad magic, version, or parameter mismatch is
treated as absent so the caller recomputes; a warning is logged but nothing
crashes.
"""

from __future__ import annotations

import logging
import os
import struct
from pathlib import Path

import numpy as np

from .fock import SECTOR_PAIR, SECTOR_PAIR_CONJ, SECTOR_R1, SectorLabel
from .spectra import ModelParams, SectorSpectrum

log = logging.getLogger(__name__)

MAGIC = b"GETHSPEC"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<8sIIddII")

SECTOR_CODES = {
    SECTOR_R1: 0,
    SECTOR_PAIR: 1,
    SECTOR_PAIR_CONJ: 2,
    SectorLabel(0, 1): 3,
    SectorLabel(0, -1): 4,
}
_CODE_SECTORS = {v: k for k, v in SECTOR_CODES.items()}


def default_cache_dir() -> Path:
    """GETHLAB_CACHE if set, else ~/.cache/gethlab."""
    env = os.environ.get("GETHLAB_CACHE", "")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "gethlab"


def cache_path(root: Path, params: ModelParams, label: SectorLabel) -> Path:
    code = SECTOR_CODES[label]
    name = (
        f"spectrum_v{FORMAT_VERSION}_N{params.n_particles}"
        f"_J{params.hopping:.12g}_U{params.interaction:.12g}_s{code}.bin"
    )
    return Path(root) / name


def save_spectrum(root: Path, params: ModelParams, spec: SectorSpectrum) -> Path:
    """Write one sector spectrum; the write is atomic via a temp file."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    path = cache_path(root, params, spec.label)
    dim = len(spec.energies)
    header = _HEADER.pack(
        MAGIC,
        FORMAT_VERSION,
        params.n_particles,
        params.hopping,
        params.interaction,
        SECTOR_CODES[spec.label],
        dim,
    )
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(spec.energies, dtype="<f8").tobytes())
        vecs = np.ascontiguousarray(spec.eigenvectors, dtype="<c16")
        fh.write(vecs.tobytes(order="F"))
    os.replace(tmp, path)
    return path


def load_spectrum(
    root: Path, params: ModelParams, label: SectorLabel
) -> SectorSpectrum | None:
    """Read one sector spectrum, or None when absent/corrupt/mismatched."""
    path = cache_path(Path(root), params, label)
    if not path.exists():
        return None
    try:
        with open(path, "rb") as fh:
            raw = fh.read(_HEADER.size)
            if len(raw) < _HEADER.size:
                raise ValueError("truncated header")
            magic, version, n, j, u, code, dim = _HEADER.unpack(raw)
            if magic != MAGIC:
                raise ValueError("bad magic")
            if version != FORMAT_VERSION:
                raise ValueError(f"format version {version} != {FORMAT_VERSION}")
            if (n, code) != (params.n_particles, SECTOR_CODES[label]):
                raise ValueError("header does not match the requested spectrum")
            if not (j == params.hopping and u == params.interaction):
                raise ValueError("couplings in header do not match")
            energies = np.frombuffer(fh.read(8 * dim), dtype="<f8")
            if len(energies) != dim:
                raise ValueError("truncated energy block")
            flat = np.frombuffer(fh.read(16 * dim * dim), dtype="<c16")
            if len(flat) != dim * dim:
                raise ValueError("truncated eigenvector block")
            vectors = flat.reshape((dim, dim), order="F")
    except (OSError, ValueError, struct.error) as exc:
        log.warning("ignoring unusable cache file %s (%s); recomputing", path, exc)
        return None
    return SectorSpectrum(label, energies.copy(), vectors.copy())
