"""Time the numba and pure-numpy kernel backends side by side.

Run twice in one process is impossible (the backend is chosen at import), so
this script re-executes itself under GETHLAB_NO_NUMBA=1 for the numpy
column. Usage: python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import os
import subprocess
import sys
import time

import numpy as np


def time_backend() -> dict[str, float]:
    from gethlab import _kernels

    rng = np.random.default_rng(42)
    y0 = rng.standard_normal(6)
    y0 *= np.sqrt(2.0) / np.linalg.norm(y0)

    # warm up (includes numba compilation when active)
    _kernels.dp54_sample(y0, 1.0, -5.0, 1.0, 0.1, 1e-13, 1e-14)
    _kernels.rk4_sample(y0, 1.0, -5.0, 1.0, 1e-3, 0.1)
    pts = rng.standard_normal((1000, 6))
    _kernels.phase_space_energy(pts, 1.0, -5.0)

    out = {"backend": _kernels.backend_name()}

    t = time.perf_counter()
    _kernels.dp54_sample(y0, 1.0, -5.0, 200.0, 0.1, 1e-13, 1e-14)
    out["dp54 t=200"] = time.perf_counter() - t

    t = time.perf_counter()
    _kernels.rk4_sample(y0, 1.0, -5.0, 20.0, 1e-3, 0.1)
    out["rk4 t=20 dt=1e-3"] = time.perf_counter() - t

    pts = rng.standard_normal((1_000_000, 6))
    t = time.perf_counter()
    _kernels.phase_space_energy(pts, 1.0, -5.0)
    out["energy 1e6 pts"] = time.perf_counter() - t
    return out


def main():
    if os.environ.get("_BENCH_CHILD"):
        res = time_backend()
        for k, v in res.items():
            print(f"{k}\t{v}")
        return

    rows = {}
    for no_numba in ("", "1"):
        env = dict(os.environ, _BENCH_CHILD="1", GETHLAB_NO_NUMBA=no_numba)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__)],
            env=env, capture_output=True, text=True, check=True,
        )
        col = {}
        for line in proc.stdout.splitlines():
            k, _, v = line.partition("\t")
            col[k] = v
        backend = col.pop("backend")
        rows[backend] = {k: float(v) for k, v in col.items()}

    names = list(next(iter(rows.values())))
    print(f"{'kernel':<22}" + "".join(f"{b:>12}" for b in rows) + f"{'speedup':>10}")
    for name in names:
        times = [rows[b][name] for b in rows]
        ratio = times[1] / times[0] if times[0] > 0 else float("inf")
        print(f"{name:<22}" + "".join(f"{t:>12.4f}" for t in times)
              + f"{ratio:>9.1f}x")


if __name__ == "__main__":
    main()
