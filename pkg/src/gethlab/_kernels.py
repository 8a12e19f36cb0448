"""Hot numeric kernels: trajectory integrators and Monte Carlo energy scans.

Two backends share one algorithm source. By default the loop kernels are
compiled with numba; setting the environment variable ``GETHLAB_NO_NUMBA=1``
before import selects the pure-Python/numpy path instead (identical results,
slower). ``benchmarks/bench_kernels.py`` times the two side by side.
"""

from __future__ import annotations

import math
import os

import numpy as np

USE_NUMBA = os.environ.get("GETHLAB_NO_NUMBA", "") not in ("1", "true", "yes")
if USE_NUMBA:
    try:
        import numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# right-hand side of Hamilton's equations for H/N
# ---------------------------------------------------------------------------

def _rhs_impl(y, hopping, interaction, out):
    for i in range(3):
        q = y[i]
        p = y[3 + i]
        dens = q * q + p * p
        out[i] = (
            -hopping * (y[3 + (i + 1) % 3] + y[3 + (i + 2) % 3])
            + interaction * dens * p
        )
        out[3 + i] = (
            hopping * (y[(i + 1) % 3] + y[(i + 2) % 3]) - interaction * dens * q
        )


def _energy_impl(y, hopping, interaction):
    h = 0.0
    for i in range(3):
        j = (i + 1) % 3
        h += -hopping * (y[j] * y[i] + y[3 + j] * y[3 + i])
        dens = y[i] * y[i] + y[3 + i] * y[3 + i]
        h += 0.25 * interaction * dens * dens
    return h


def _dp54_sample_impl(y0, hopping, interaction, t_max, sample_dt, rtol, atol):
    """Adaptive RK5(4) with FSAL, recording the state every sample_dt.

    Returns (samples, ok); samples[0] is the initial state. ok is False on
    step-size underflow.
    """
    nseg = int(round(t_max / sample_dt))
    samples = np.empty((nseg + 1, 6))
    y = y0.copy()
    for i in range(6):
        samples[0, i] = y0[i]

    k = np.empty((7, 6))
    ytmp = np.empty(6)
    ynew = np.empty(6)
    _rhs_impl(y, hopping, interaction, k[0])

    t = 0.0
    h_prop = 1e-4
    a21 = 0.2
    a31, a32 = 3.0 / 40.0, 9.0 / 40.0
    a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    a51, a52, a53, a54 = (19372.0 / 6561.0, -25360.0 / 2187.0,
                          64448.0 / 6561.0, -212.0 / 729.0)
    a61, a62, a63, a64, a65 = (9017.0 / 3168.0, -355.0 / 33.0,
                               46732.0 / 5247.0, 49.0 / 176.0,
                               -5103.0 / 18656.0)
    b1, b3, b4, b5, b6 = (35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0,
                          -2187.0 / 6784.0, 11.0 / 84.0)
    e1, e3, e4, e5, e6, e7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                              -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

    for s in range(1, nseg + 1):
        t_target = s * sample_dt
        while t < t_target - 1e-12 * t_target:
            h = h_prop
            if t + h > t_target:
                h = t_target - t
            # stages
            for i in range(6):
                ytmp[i] = y[i] + h * a21 * k[0, i]
            _rhs_impl(ytmp, hopping, interaction, k[1])
            for i in range(6):
                ytmp[i] = y[i] + h * (a31 * k[0, i] + a32 * k[1, i])
            _rhs_impl(ytmp, hopping, interaction, k[2])
            for i in range(6):
                ytmp[i] = y[i] + h * (a41 * k[0, i] + a42 * k[1, i] + a43 * k[2, i])
            _rhs_impl(ytmp, hopping, interaction, k[3])
            for i in range(6):
                ytmp[i] = y[i] + h * (a51 * k[0, i] + a52 * k[1, i]
                                      + a53 * k[2, i] + a54 * k[3, i])
            _rhs_impl(ytmp, hopping, interaction, k[4])
            for i in range(6):
                ytmp[i] = y[i] + h * (a61 * k[0, i] + a62 * k[1, i]
                                      + a63 * k[2, i] + a64 * k[3, i]
                                      + a65 * k[4, i])
            _rhs_impl(ytmp, hopping, interaction, k[5])
            for i in range(6):
                ynew[i] = y[i] + h * (b1 * k[0, i] + b3 * k[2, i] + b4 * k[3, i]
                                      + b5 * k[4, i] + b6 * k[5, i])
            _rhs_impl(ynew, hopping, interaction, k[6])

            errsq = 0.0
            for i in range(6):
                err = h * (e1 * k[0, i] + e3 * k[2, i] + e4 * k[3, i]
                           + e5 * k[4, i] + e6 * k[5, i] + e7 * k[6, i])
                ymag = abs(y[i])
                if abs(ynew[i]) > ymag:
                    ymag = abs(ynew[i])
                scale = atol + rtol * ymag
                errsq += (err / scale) ** 2
            errnorm = math.sqrt(errsq / 6.0)

            if errnorm <= 1.0:
                t += h
                for i in range(6):
                    y[i] = ynew[i]
                    k[0, i] = k[6, i]
                if errnorm == 0.0:
                    fac = 5.0
                else:
                    fac = 0.9 * errnorm ** -0.2
                    if fac > 5.0:
                        fac = 5.0
                    elif fac < 0.2:
                        fac = 0.2
                h_prop = h * fac
            else:
                fac = 0.9 * errnorm ** -0.2
                if fac < 0.2:
                    fac = 0.2
                h_prop = h * fac
                if h_prop < 1e-13:
                    return samples, False
        for i in range(6):
            samples[s, i] = y[i]
    return samples, True


def _rk4_sample_impl(y0, hopping, interaction, t_max, dt, sample_dt):
    """Classical fixed-step RK4 in double precision, sampling every sample_dt."""
    stride = int(round(sample_dt / dt))
    nseg = int(round(t_max / sample_dt))
    samples = np.empty((nseg + 1, 6))
    y = y0.copy()
    for i in range(6):
        samples[0, i] = y0[i]
    k1 = np.empty(6)
    k2 = np.empty(6)
    k3 = np.empty(6)
    k4 = np.empty(6)
    ytmp = np.empty(6)
    for s in range(1, nseg + 1):
        for _ in range(stride):
            _rhs_impl(y, hopping, interaction, k1)
            for i in range(6):
                ytmp[i] = y[i] + 0.5 * dt * k1[i]
            _rhs_impl(ytmp, hopping, interaction, k2)
            for i in range(6):
                ytmp[i] = y[i] + 0.5 * dt * k2[i]
            _rhs_impl(ytmp, hopping, interaction, k3)
            for i in range(6):
                ytmp[i] = y[i] + dt * k3[i]
            _rhs_impl(ytmp, hopping, interaction, k4)
            for i in range(6):
                y[i] += dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0
        for i in range(6):
            samples[s, i] = y[i]
    return samples, True


def _phase_space_energy_loop(qp, hopping, interaction, out):
    for k in range(qp.shape[0]):
        out[k] = _energy_impl(qp[k], hopping, interaction)


def _phase_space_energy_numpy(qp, hopping, interaction):
    q = qp[:, :3]
    p = qp[:, 3:]
    hop = -hopping * (
        (np.roll(q, -1, axis=1) * q).sum(axis=1)
        + (np.roll(p, -1, axis=1) * p).sum(axis=1)
    )
    dens = q * q + p * p
    return hop + 0.25 * interaction * (dens * dens).sum(axis=1)


if USE_NUMBA:
    # nogil: the kernels touch only primitive arrays, so trajectory ensembles
    # can run on a plain thread pool with real parallelism
    _rhs_impl = numba.njit(cache=True, nogil=True)(_rhs_impl)
    _energy_impl = numba.njit(cache=True, nogil=True)(_energy_impl)
    dp54_sample = numba.njit(cache=True, nogil=True)(_dp54_sample_impl)
    rk4_sample = numba.njit(cache=True, nogil=True)(_rk4_sample_impl)
    _energy_loop = numba.njit(cache=True, nogil=True)(_phase_space_energy_loop)

    def phase_space_energy(qp, hopping, interaction):
        out = np.empty(qp.shape[0])
        _energy_loop(qp, hopping, interaction, out)
        return out

else:
    dp54_sample = _dp54_sample_impl
    rk4_sample = _rk4_sample_impl
    phase_space_energy = _phase_space_energy_numpy


def phase_space_energy_reference(qp, hopping, interaction):
    """Vectorized numpy evaluation, kept for cross-backend checks."""
    return _phase_space_energy_numpy(qp, hopping, interaction)
