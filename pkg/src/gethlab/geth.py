"""Deviation statistics, finite-size scaling, witnesses, and region labels.

The two deviation statistics per degenerate subspace are

    deltaT      = |T_n / d_n - O_ME(E_n)| / eta
    deltaLambda = max_a |lambda_{n,a} - T_n / d_n| / eta

with the modulus taken throughout for the complex-spectrum imbalance. A
spectral window is symmetry-breaking when (effectively) all of its subspaces
carry an order-parameter eigenvalue above the classical-trajectory bound:
0.1 for the imbalance, sqrt(3)/10 for the current.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .observables import ProjectionTable, spectral_width

#: symmetry-breaking bounds = classical maximum / 10
SB_BOUND_IMBALANCE = 0.1
SB_BOUND_CURRENT = np.sqrt(3.0) / 10.0

#: share of subspaces that must exceed the bound for a "breaking" label;
#: slightly below 1 to tolerate pairing stragglers at window edges
BREAKING_SHARE = 0.99


@dataclass(frozen=True)
class EthRecord:
    """Deviations for one subspace; both entries are non-negative."""

    index: int
    energy_per_particle: float
    delta_trace: float
    delta_lambda: float


def deviation_records(
    table: ProjectionTable,
    microcanonical,
    subset: np.ndarray | None = None,
) -> list[EthRecord]:
    """Per-subspace deviation statistics against a microcanonical reference.

    ``microcanonical`` is either a scalar or a callable evaluated at each
    subspace's energy per particle. ``subset`` optionally restricts to given
    subspace positions in the table.
    """
    eta = spectral_width(table.kind)
    idx = np.arange(len(table)) if subset is None else np.asarray(subset)
    records = []
    for i in idx:
        e = float(table.energies_per_particle[i])
        ome = microcanonical(e) if callable(microcanonical) else microcanonical
        mean = table.traces[i] / 3.0
        dt = abs(mean - ome) / eta
        dl = np.abs(table.eigenvalues[i] - mean).max() / eta
        records.append(EthRecord(int(i), e, float(dt), float(dl)))
    return records


@dataclass(frozen=True)
class ScalingResult:
    """Power-law fit sigma(N) = amplitude * N**exponent on log-log axes."""

    kind: str
    sizes: np.ndarray
    sigmas: np.ndarray
    exponent: float
    amplitude: float
    residual: float


def scaling_fit(kind: str, sizes, sigmas) -> ScalingResult:
    """Least-squares line through (log N, log sigma)."""
    sizes = np.asarray(sizes, dtype=float)
    sigmas = np.asarray(sigmas, dtype=float)
    if len(sizes) < 3:
        raise ValueError("need at least 3 sizes for a scaling fit")
    if np.any(sigmas <= 0):
        raise ValueError("sigmas must be positive")
    if np.any(np.diff(sizes) <= 0):
        raise ValueError("sizes must be ascending")
    x, y = np.log(sizes), np.log(sigmas)
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    return ScalingResult(
        kind, sizes, sigmas, float(slope), float(np.exp(intercept)), residual
    )


def deviation_population(table: ProjectionTable, microcanonical, subset=None):
    """Signed deviation sample whose std feeds the scaling fit.

    hopping12: trace means minus the microcanonical value. Order parameters:
    the subspace eigenvalues themselves (their microcanonical value is zero);
    real and imaginary parts are pooled for the imbalance.
    """
    idx = np.arange(len(table)) if subset is None else np.asarray(subset)
    if table.kind == "hopping12":
        vals = []
        for i in idx:
            e = float(table.energies_per_particle[i])
            ome = microcanonical(e) if callable(microcanonical) else microcanonical
            vals.append((table.traces[i] / 3.0).real - ome)
        return np.array(vals)
    lams = table.eigenvalues[idx].ravel()
    if table.kind == "current":
        return lams.real
    return np.concatenate([lams.real, lams.imag])


def exceedance_counts(deviations: np.ndarray, bounds) -> dict[float, int]:
    """Number of entries whose magnitude exceeds each bound."""
    dev = np.abs(np.asarray(deviations))
    return {float(b): int(np.count_nonzero(dev > b)) for b in bounds}


@dataclass(frozen=True)
class InitialCondition:
    """Amplitudes over the block-diagonalized (tilde) eigenbasis of a shell.

    ``coefficients`` maps (subspace position in the table, member index 0..2)
    to a complex amplitude; the vector must be unit norm.
    """

    coefficients: dict[tuple[int, int], complex]

    def __post_init__(self):
        norm = np.sqrt(sum(abs(c) ** 2 for c in self.coefficients.values()))
        if abs(norm - 1.0) > 1e-12:
            raise ValueError(f"initial condition not normalized (norm {norm})")


def long_time_average(ic: InitialCondition, table: ProjectionTable) -> complex:
    """Diagonal-ensemble value sum |c_tilde|^2 lambda in the tilde basis."""
    total = 0.0 + 0.0j
    for (n, a), c in ic.coefficients.items():
        if not 0 <= n < len(table):
            raise ValueError(f"initial condition supported outside the table (n={n})")
        total += abs(c) ** 2 * table.eigenvalues[n, a]
    return total


def uniform_superposition(n: int) -> InitialCondition:
    """The witness state sum_a |tilde E_{n,a}> / sqrt(3)."""
    c = 1.0 / np.sqrt(3.0)
    return InitialCondition({(n, a): c for a in range(3)})


def tilde_eigenvector(n: int, a: int) -> InitialCondition:
    """The witness state |tilde E_{n,a}>."""
    return InitialCondition({(n, a): 1.0})


# ---------------------------------------------------------------------------
# region classification
# ---------------------------------------------------------------------------

LABEL_ROTATION = "ROTATION_BREAKING"
LABEL_REFLECTION = "REFLECTION_BREAKING"
LABEL_MIXED = "MIXED"
LABEL_THERMAL = "THERMAL_CANDIDATE"
LABEL_SPARSE = "INSUFFICIENT_DATA"


@dataclass(frozen=True)
class WindowReport:
    center: float
    count: int
    label: str
    fraction_imbalance: float
    fraction_current: float
    max_imbalance: float
    max_current: float


def classify_regions(
    imbalance: ProjectionTable,
    current: ProjectionTable,
    window_width: float = 0.1,
    min_count: int = 5,
    bound_imbalance: float = SB_BOUND_IMBALANCE,
    bound_current: float = SB_BOUND_CURRENT,
    h12_shrinks: bool | None = None,
) -> list[WindowReport]:
    """Label equal-width windows in E/N by their symmetry-breaking content.

    Per window: ROTATION_BREAKING if (>= 99% of) subspaces carry
    max|lambda^(I)| above its bound, REFLECTION_BREAKING likewise for the
    current, MIXED if some but effectively none/all, THERMAL_CANDIDATE if
    neither order parameter exceeds anywhere (additionally requiring the
    trace deviations of hopping12 to shrink with N when that evidence is
    supplied via ``h12_shrinks``).
    """
    e = imbalance.energies_per_particle
    if not np.allclose(e, current.energies_per_particle):
        raise ValueError("tables were built from different subspace sets")
    max_i = np.abs(imbalance.eigenvalues).max(axis=1)
    max_c = np.abs(current.eigenvalues).max(axis=1)

    lo = np.floor(e.min() / window_width) * window_width
    hi = e.max()
    reports = []
    center = lo + window_width / 2.0
    while center - window_width / 2.0 <= hi:
        mask = np.abs(e - center) <= window_width / 2.0
        count = int(mask.sum())
        if count < min_count:
            reports.append(
                WindowReport(round(center, 12), count, LABEL_SPARSE, 0.0, 0.0, 0.0, 0.0)
            )
            center += window_width
            continue
        frac_i = float(np.mean(max_i[mask] > bound_imbalance))
        frac_c = float(np.mean(max_c[mask] > bound_current))
        if frac_i >= BREAKING_SHARE:
            label = LABEL_ROTATION
        elif frac_c >= BREAKING_SHARE:
            label = LABEL_REFLECTION
        elif frac_i <= 1.0 - BREAKING_SHARE and frac_c <= 1.0 - BREAKING_SHARE:
            label = LABEL_THERMAL if h12_shrinks in (None, True) else LABEL_MIXED
        else:
            label = LABEL_MIXED
        reports.append(
            WindowReport(
                round(center, 12),
                count,
                label,
                frac_i,
                frac_c,
                float(max_i[mask].max()),
                float(max_c[mask].max()),
            )
        )
        center += window_width
    return reports
