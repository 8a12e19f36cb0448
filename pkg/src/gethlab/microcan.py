"""Monte Carlo microcanonical averages over a thin classical energy shell.

Phase-space points are drawn uniformly from the dynamics' invariant sphere
sum(q^2+p^2) = 2 (default; this is the manifold the quantum model limits to
and the one whose shell averages the eigenstate traces track) or from the full
ball sum(q^2+p^2) <= 2, then rejection-filtered to |H/N - E| <= delta_e.
Batches use
counter-based RNG streams keyed by (seed, batch) so results are independent
of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .classical import classical_observables

LOW_CONFIDENCE_FLOOR = 1000


@dataclass(frozen=True)
class McEstimate:
    """Shell average of one observable with its Monte Carlo standard error."""

    kind: str
    e_over_n: float
    value: complex
    stderr: float
    accepted: int
    total: int
    delta_e: float

    @property
    def low_confidence(self) -> bool:
        return self.accepted < LOW_CONFIDENCE_FLOOR


def _stream(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + index))


def _draw(rng: np.random.Generator, n: int, domain: str) -> np.ndarray:
    g = rng.standard_normal((n, 6))
    g /= np.linalg.norm(g, axis=1)[:, None]
    if domain == "ball":
        return g * (np.sqrt(2.0) * rng.random(n) ** (1.0 / 6.0))[:, None]
    if domain == "sphere":
        return g * np.sqrt(2.0)
    raise ValueError(f"unknown domain {domain!r}")


def mc_average(
    kind: str,
    e_over_n: float,
    hopping: float = 1.0,
    interaction: float = -5.0,
    delta_e: float = 0.01,
    n_samples: int = 10_000_000,
    seed: int = 0,
    domain: str = "sphere",
    batch: int = 1 << 20,
) -> McEstimate:
    """Shell average of one intensive observable by rejection sampling.

    kind is "hopping12", "current" or "imbalance" (complex value; stderr is
    the larger of the component errors). Deterministic under the seed.
    """
    obs_index = {"imbalance": 0, "current": 1, "hopping12": 2}[kind]
    accepted = 0
    total = 0
    sum_re = 0.0
    sum_im = 0.0
    sumsq_re = 0.0
    sumsq_im = 0.0
    batch_index = 0
    while total < n_samples:
        n = min(batch, n_samples - total)
        rng = _stream(seed, batch_index)
        batch_index += 1
        pts = _draw(rng, n, domain)
        h = _kernels.phase_space_energy(pts, hopping, interaction)
        keep = np.abs(h - e_over_n) <= delta_e
        total += n
        if not keep.any():
            continue
        vals = classical_observables(pts[keep])[obs_index]
        vals = np.asarray(vals)
        accepted += len(vals)
        sum_re += vals.real.sum()
        sumsq_re += (vals.real**2).sum()
        if kind == "imbalance":
            sum_im += vals.imag.sum()
            sumsq_im += (vals.imag**2).sum()
    if accepted == 0:
        return McEstimate(kind, e_over_n, float("nan"), float("inf"),
                          0, total, delta_e)
    mean_re = sum_re / accepted
    var_re = max(sumsq_re / accepted - mean_re**2, 0.0)
    err = np.sqrt(var_re / accepted)
    value: complex | float = mean_re
    if kind == "imbalance":
        mean_im = sum_im / accepted
        var_im = max(sumsq_im / accepted - mean_im**2, 0.0)
        err = max(err, np.sqrt(var_im / accepted))
        value = complex(mean_re, mean_im)
    return McEstimate(kind, e_over_n, value, float(err), accepted, total, delta_e)


@dataclass(frozen=True)
class McGrid:
    """Estimates on an ascending E/N grid with linear interpolation."""

    kind: str
    estimates: list[McEstimate]

    @property
    def grid(self) -> np.ndarray:
        return np.array([e.e_over_n for e in self.estimates])

    @property
    def values(self) -> np.ndarray:
        return np.array([e.value for e in self.estimates])

    def __call__(self, e_over_n: float) -> float:
        g = self.grid
        if not g[0] <= e_over_n <= g[-1]:
            raise ValueError(
                f"query E/N = {e_over_n} outside the grid [{g[0]}, {g[-1]}]"
            )
        v = self.values
        if np.iscomplexobj(v):
            return complex(
                np.interp(e_over_n, g, v.real) + 1j * np.interp(e_over_n, g, v.imag)
            )
        return float(np.interp(e_over_n, g, v.real))


def mc_grid(
    kind: str,
    grid: np.ndarray,
    hopping: float = 1.0,
    interaction: float = -5.0,
    delta_e: float = 0.01,
    n_samples: int = 10_000_000,
    seed: int = 0,
    domain: str = "sphere",
) -> McGrid:
    """One independent mc_average per ascending grid point."""
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly ascending")
    estimates = [
        mc_average(kind, float(e), hopping, interaction, delta_e,
                   n_samples, seed + 7919 * i, domain)
        for i, e in enumerate(grid)
    ]
    return McGrid(kind, estimates)
