"""Classical limit of the trimer: Hamilton dynamics and trajectory ensembles.

Phase space is (q1..q3, p1..p3) with the particle-number constraint
sum_i (q_i^2 + p_i^2) = 2 conserved by the flow of

    H/N = sum_i [ -J (q_{i+1} q_i + p_{i+1} p_i) + (U/4)(q_i^2 + p_i^2)^2 ].

Trajectories are integrated either with an adaptive RK5(4) in double
precision (mode "fast") or with a fixed-step RK4 in extended-precision
arithmetic at two working precisions (mode "paper"), whose mutual distance is
the chaos diagnostic. The fast chaos surrogate uses a 1e-10 twin perturbation
in double precision with the same time-averaged-distance threshold.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from . import _kernels

OMEGA = np.exp(2j * np.pi / 3)

CHAOS_THRESHOLD = 0.3
SB_BOUND_IMBALANCE = 0.1
SB_BOUND_CURRENT = np.sqrt(3.0) / 10.0

TWIN_PERTURBATION = 1e-10


def hamiltonian_per_particle(state: np.ndarray, hopping: float, interaction: float):
    """H/N for one state (6,) or a batch (n, 6)."""
    qp = np.atleast_2d(np.asarray(state, dtype=float))
    h = _kernels.phase_space_energy_reference(qp, hopping, interaction)
    return h[0] if np.ndim(state) == 1 else h


def classical_observables(state: np.ndarray):
    """(I/N, C/N, h12/N) for one state (6,) or a batch (n, 6)."""
    qp = np.atleast_2d(np.asarray(state, dtype=float))
    q, p = qp[:, :3], qp[:, 3:]
    dens = q * q + p * p
    imb = 0.5 * (dens[:, 0] + OMEGA * dens[:, 1] + OMEGA**2 * dens[:, 2])
    cur = (p * np.roll(q, -1, axis=1) - np.roll(p, -1, axis=1) * q).sum(axis=1)
    hop = q[:, 0] * q[:, 1] + p[:, 0] * p[:, 1]
    if np.ndim(state) == 1:
        return complex(imb[0]), float(cur[0]), float(hop[0])
    return imb, cur, hop


def equations_of_motion(state: np.ndarray, hopping: float, interaction: float):
    """dq/dt = d(H/N)/dp, dp/dt = -d(H/N)/dq in closed form."""
    y = np.asarray(state, dtype=float)
    q, p = y[:3], y[3:]
    dens = q * q + p * p
    dq = -hopping * (np.roll(p, -1) + np.roll(p, 1)) + interaction * dens * p
    dp = hopping * (np.roll(q, -1) + np.roll(q, 1)) - interaction * dens * q
    return np.concatenate([dq, dp])


def _stream(seed: int, index: int) -> np.random.Generator:
    """Counter-based per-item RNG stream; reproducible under any schedule."""
    return np.random.Generator(np.random.Philox(key=(int(seed) << 64) + index))


def sample_initial_conditions(
    e_over_n: float,
    hopping: float = 1.0,
    interaction: float = -5.0,
    delta_e: float = 0.05,
    count: int = 200,
    seed: int = 0,
    batch: int = 1 << 16,
    min_acceptance: float = 1e-6,
) -> np.ndarray:
    """Uniform states on the 5-sphere sum(q^2+p^2)=2 inside an energy window.

    Rejection-sampled; deterministic under the seed. Raises with a diagnostic
    if the acceptance rate stays below ``min_acceptance``.
    """
    out = []
    got = 0
    attempts = 0
    batch_index = 0
    max_attempts = max(1e7, count / min_acceptance)
    while got < count:
        rng = _stream(seed, batch_index)
        batch_index += 1
        g = rng.standard_normal((batch, 6))
        g *= np.sqrt(2.0) / np.linalg.norm(g, axis=1)[:, None]
        h = _kernels.phase_space_energy(g, hopping, interaction)
        keep = np.abs(h - e_over_n) <= delta_e
        accepted = g[keep]
        out.append(accepted)
        got += len(accepted)
        attempts += batch
        if attempts > max_attempts and got == 0:
            raise RuntimeError(
                f"acceptance rate below {min_acceptance:g} for window "
                f"E/N = {e_over_n} +- {delta_e}; window may be classically forbidden"
            )
    return np.concatenate(out)[:count]


@dataclass(frozen=True)
class TrajectoryResult:
    """Long-time averages and diagnostics for one trajectory."""

    initial: np.ndarray
    energy_per_particle: float
    avg_imbalance: complex
    avg_current: float
    avg_hopping12: float
    chaos_metric: float          # nan when the metric was not requested
    energy_drift: float
    norm_drift: float
    valid: bool
    final_state: np.ndarray

    @property
    def chaotic(self) -> bool:
        return self.chaos_metric > CHAOS_THRESHOLD

    @property
    def breaks_rotation(self) -> bool:
        return abs(self.avg_imbalance) > SB_BOUND_IMBALANCE

    @property
    def breaks_reflection(self) -> bool:
        return abs(self.avg_current) > SB_BOUND_CURRENT


def propagate(
    state: np.ndarray,
    hopping: float,
    interaction: float,
    t_max: float,
    mode: str = "fast",
    rtol: float = 1e-13,
    atol: float = 1e-14,
    sample_dt: float = 0.1,
    dt: float = 1e-3,
    dps: int = 20,
):
    """Integrate one trajectory, returning (samples, ok).

    samples[k] is the state at t = k * sample_dt. Mode "fast" is adaptive
    RK5(4) in double precision; mode "paper" is fixed-step RK4 evaluated in
    mpmath arithmetic with ``dps`` significant digits.
    """
    y0 = np.ascontiguousarray(state, dtype=float)
    if mode == "fast":
        return _kernels.dp54_sample(y0, hopping, interaction, t_max, sample_dt,
                                    rtol, atol)
    if mode == "paper":
        return _propagate_mp(y0, hopping, interaction, t_max, dt, sample_dt, dps)
    raise ValueError(f"unknown mode {mode!r}")


def _propagate_mp(y0, hopping, interaction, t_max, dt, sample_dt, dps):
    """Fixed-step RK4 in mpmath arithmetic; slow, used for the chaos protocol."""
    import mpmath

    with mpmath.workdps(dps):
        J = mpmath.mpf(hopping)
        U = mpmath.mpf(interaction)
        h = mpmath.mpf(dt)
        y = [mpmath.mpf(v) for v in y0]

        def rhs(y):
            out = [mpmath.mpf(0)] * 6
            for i in range(3):
                dens = y[i] * y[i] + y[3 + i] * y[3 + i]
                out[i] = -J * (y[3 + (i + 1) % 3] + y[3 + (i + 2) % 3]) + U * dens * y[3 + i]
                out[3 + i] = J * (y[(i + 1) % 3] + y[(i + 2) % 3]) - U * dens * y[i]
            return out

        stride = int(round(sample_dt / dt))
        nseg = int(round(t_max / sample_dt))
        samples = np.empty((nseg + 1, 6))
        samples[0] = y0
        for s in range(1, nseg + 1):
            for _ in range(stride):
                k1 = rhs(y)
                k2 = rhs([y[i] + h / 2 * k1[i] for i in range(6)])
                k3 = rhs([y[i] + h / 2 * k2[i] for i in range(6)])
                k4 = rhs([y[i] + h * k3[i] for i in range(6)])
                y = [y[i] + h * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]) / 6
                     for i in range(6)]
            samples[s] = [float(v) for v in y]
    return samples, True


def integrate(
    state: np.ndarray,
    hopping: float = 1.0,
    interaction: float = -5.0,
    t_max: float = 1000.0,
    mode: str = "fast",
    transient: float = 100.0,
    sample_dt: float = 0.1,
    rtol: float = 1e-13,
    atol: float = 1e-14,
    dt: float = 1e-3,
    drift_tol: float = 1e-8,
    chaos_metric: float = float("nan"),
) -> TrajectoryResult:
    """Integrate and average observables over t in [transient, t_max]."""
    samples, ok = propagate(state, hopping, interaction, t_max, mode=mode,
                            rtol=rtol, atol=atol, sample_dt=sample_dt, dt=dt)
    h = _kernels.phase_space_energy_reference(samples, hopping, interaction)
    norms = (samples * samples).sum(axis=1)
    e_drift = float(np.abs(h - h[0]).max())
    n_drift = float(np.abs(norms - norms[0]).max())
    # short runs (t_max <= transient) fall back to averaging the final state
    first = min(int(round(transient / sample_dt)), len(samples) - 1)
    tail = samples[first:]
    imb, cur, hop = classical_observables(tail)
    return TrajectoryResult(
        initial=np.asarray(state, dtype=float),
        energy_per_particle=float(h[0]),
        avg_imbalance=complex(imb.mean()),
        avg_current=float(cur.mean()),
        avg_hopping12=float(hop.mean()),
        chaos_metric=chaos_metric,
        energy_drift=e_drift,
        norm_drift=n_drift,
        valid=bool(ok) and e_drift <= drift_tol and n_drift <= drift_tol,
        final_state=samples[-1].copy(),
    )


def chaos_metric_fast(
    state: np.ndarray,
    hopping: float = 1.0,
    interaction: float = -5.0,
    t_max: float = 1000.0,
    rtol: float = 1e-13,
    atol: float = 1e-14,
    sample_dt: float = 0.1,
    rng: np.random.Generator | None = None,
) -> float:
    """Time-averaged twin distance for a 1e-10 on-shell perturbation."""
    rng = rng or np.random.default_rng(0)
    direction = rng.standard_normal(6)
    direction /= np.linalg.norm(direction)
    twin = np.asarray(state, float) + TWIN_PERTURBATION * direction
    twin *= np.sqrt(2.0) / np.linalg.norm(twin)
    a, ok_a = propagate(state, hopping, interaction, t_max, "fast",
                        rtol=rtol, atol=atol, sample_dt=sample_dt)
    b, ok_b = propagate(twin, hopping, interaction, t_max, "fast",
                        rtol=rtol, atol=atol, sample_dt=sample_dt)
    if not (ok_a and ok_b):
        return float("nan")
    return float(np.linalg.norm(a - b, axis=1).mean())


def chaos_metric_paper(
    state: np.ndarray,
    hopping: float = 1.0,
    interaction: float = -5.0,
    t_max: float = 1000.0,
    dt: float = 1e-3,
    sample_dt: float = 0.1,
    dps_low: int = 20,
    dps_high: int = 25,
) -> float:
    """Time-averaged distance between the 20- and 25-digit fixed-step runs."""
    a, _ = propagate(state, hopping, interaction, t_max, "paper",
                     dt=dt, sample_dt=sample_dt, dps=dps_low)
    b, _ = propagate(state, hopping, interaction, t_max, "paper",
                     dt=dt, sample_dt=sample_dt, dps=dps_high)
    return float(np.linalg.norm(a - b, axis=1).mean())


def run_ensemble(
    e_over_n: float,
    hopping: float = 1.0,
    interaction: float = -5.0,
    count: int = 200,
    seed: int = 0,
    delta_e: float = 0.05,
    t_max: float = 1000.0,
    mode: str = "fast",
    transient: float = 100.0,
    sample_dt: float = 0.1,
    rtol: float = 1e-13,
    atol: float = 1e-14,
    dt: float = 1e-3,
    with_chaos: bool = True,
    workers: int = 1,
) -> list[TrajectoryResult]:
    """Sample, integrate, and diagnose an ensemble at fixed energy.

    Results are returned in trajectory-index order regardless of the worker
    schedule; trajectory k uses the RNG stream keyed by (seed+1, k).
    """
    states = sample_initial_conditions(
        e_over_n, hopping, interaction, delta_e=delta_e, count=count, seed=seed
    )

    def one(k: int) -> TrajectoryResult:
        y0 = states[k]
        if with_chaos:
            if mode == "paper":
                metric = chaos_metric_paper(y0, hopping, interaction, t_max,
                                            dt=dt, sample_dt=sample_dt)
            else:
                metric = chaos_metric_fast(y0, hopping, interaction, t_max,
                                           rtol=rtol, atol=atol,
                                           sample_dt=sample_dt,
                                           rng=_stream(seed + 1, k))
        else:
            metric = float("nan")
        return integrate(y0, hopping, interaction, t_max, mode=mode,
                         transient=transient, sample_dt=sample_dt,
                         rtol=rtol, atol=atol, dt=dt, chaos_metric=metric)

    if workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, range(count)))
    return [one(k) for k in range(count)]


def chaos_fraction(results: list[TrajectoryResult]) -> float:
    """Share of valid trajectories whose chaos metric exceeds the threshold."""
    valid = [r for r in results if r.valid]
    if not valid:
        return float("nan")
    return float(np.mean([r.chaotic for r in valid]))


def symmetry_breaking_fraction(results: list[TrajectoryResult]) -> tuple[float, float]:
    """(rotation-breaking share, reflection-breaking share) over valid runs."""
    valid = [r for r in results if r.valid]
    if not valid:
        return float("nan"), float("nan")
    return (
        float(np.mean([r.breaks_rotation for r in valid])),
        float(np.mean([r.breaks_reflection for r in valid])),
    )
