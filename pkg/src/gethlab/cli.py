"""Command line driver: compute, cache, analyze, and plot.

Subcommands: spectrum, subspaces, classical, mc, stats, figure, report.
Exit codes: 0 success, 2 config error, 3 missing prerequisite, 4 numerical
failure. Outputs are CSV (schema-versioned header line), JSON, and SVG; every
produced file is appended to ``manifest.jsonl`` with its content hash.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, cache, classical, config, geth, microcan, observables
from . import rmtstats, spectra, svgplot
from .config import ConfigError, RunConfig
from .fock import SECTOR_PAIR, SECTOR_R1, SectorLabel, build_sector_basis
from .spectra import EigensolverError, ModelParams

log = logging.getLogger("gethlab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_NUMERICAL = 4

SCHEMA_PREFIX = "# geth-lab v1 schema="


class MissingPrerequisite(RuntimeError):
    """An input artifact is absent; the message names the command to run."""


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    return str(v)


def write_csv(path: Path, schema: str, columns: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [SCHEMA_PREFIX + schema, ",".join(columns)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path: Path, schema: str, producer: str):
    """Rows of a schema-tagged CSV as string lists; raises MissingPrerequisite."""
    if not path.exists():
        raise MissingPrerequisite(
            f"{path} not found; produce it with: gethlab {producer}"
        )
    lines = path.read_text().splitlines()
    if not lines or lines[0] != SCHEMA_PREFIX + schema:
        raise MissingPrerequisite(
            f"{path} does not carry schema {schema!r}; regenerate it with: "
            f"gethlab {producer}"
        )
    header = lines[1].split(",")
    return header, [line.split(",") for line in lines[2:] if line]


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class Manifest:
    """Append-only jsonl run log in the output directory."""

    def __init__(self, out_dir: Path, command: str, cfg: RunConfig):
        self.out_dir = out_dir
        self.command = command
        self.cfg = cfg
        self.stages: dict[str, float] = {}
        self.outputs: list[Path] = []
        self.cache_keys: list[str] = []
        self._t0 = time.monotonic()

    def stage(self, name: str):
        manifest = self

        class _Timer:
            def __enter__(self):
                self.t = time.monotonic()

            def __exit__(self, *exc):
                manifest.stages[name] = round(time.monotonic() - self.t, 4)

        return _Timer()

    def add(self, path: Path) -> Path:
        self.outputs.append(path)
        return path

    def write(self):
        self.out_dir.mkdir(parents=True, exist_ok=True)
        entry = {
            "command": self.command,
            "version": __version__,
            "unix_time": round(time.time(), 3),
            "wall_seconds": round(time.monotonic() - self._t0, 4),
            "config": config.dumps(self.cfg),
            "stages": self.stages,
            "cache_keys": sorted(set(self.cache_keys)),
            "outputs": {str(p): _sha256(p) for p in self.outputs},
        }
        with open(self.out_dir / "manifest.jsonl", "a") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")


# ---------------------------------------------------------------------------
# shared computation steps
# ---------------------------------------------------------------------------

def cached_spectrum(
    cache_dir: Path,
    params: ModelParams,
    label: SectorLabel,
    manifest: Manifest | None = None,
) -> tuple[spectra.SectorSpectrum, bool]:
    """Load one sector spectrum from the cache or compute and store it.

    Returns (spectrum, was_cache_hit).
    """
    spec = cache.load_spectrum(cache_dir, params, label)
    if manifest is not None:
        manifest.cache_keys.append(cache.cache_path(cache_dir, params, label).name)
    if spec is not None:
        return spec, True
    basis = build_sector_basis(params.n_particles, label)
    block = spectra.build_hamiltonian(params, basis)
    spec = spectra.diagonalize_sector(block, label)
    cache.save_spectrum(cache_dir, params, spec)
    return spec, False


def build_tables(cfg: RunConfig, cache_dir: Path, n: int, manifest=None):
    """Subspace set plus the three projection tables for one system size."""
    params = ModelParams(n, cfg.hopping, cfg.interaction)
    spec_r1, _ = cached_spectrum(cache_dir, params, SECTOR_R1, manifest)
    spec_pair, _ = cached_spectrum(cache_dir, params, SECTOR_PAIR, manifest)
    subs = spectra.assemble_subspaces(params, spec_r1, spec_pair)
    basis_r1 = build_sector_basis(n, SECTOR_R1)
    basis_pair = build_sector_basis(n, SECTOR_PAIR)
    tables = {
        kind: observables.project_all(kind, subs, basis_pair, basis_r1)
        for kind in observables.KINDS
    }
    return subs, tables


def _grid(cfg: RunConfig) -> np.ndarray:
    count = int(round((cfg.grid_max - cfg.grid_min) / cfg.grid_step)) + 1
    return cfg.grid_min + cfg.grid_step * np.arange(count)


def _subspace_csv_path(out: Path, n: int, kind: str) -> Path:
    return out / f"subspaces_N{n}_{kind}.csv"


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_spectrum(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, "spectrum", cfg)
    n = args.n or cfg.n_particles
    params = ModelParams(n, cfg.hopping, cfg.interaction)
    with manifest.stage("diagonalize"):
        for label in (SECTOR_R1, SECTOR_PAIR):
            spec, hit = cached_spectrum(cache_dir, params, label, manifest)
            print(f"sector {label}: {len(spec.energies)} levels "
                  f"({'cache hit' if hit else 'computed'})")
    manifest.write()
    return EXIT_OK


def cmd_subspaces(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, "subspaces", cfg)
    n = args.n or cfg.n_particles
    with manifest.stage("assemble"):
        subs, tables = build_tables(cfg, cache_dir, n, manifest)
    with manifest.stage("write"):
        for kind, table in tables.items():
            rows = []
            for i in range(len(table)):
                lam = table.eigenvalues[i]
                tr = table.traces[i]
                rows.append(
                    [i, float(table.energies_per_particle[i])]
                    + [float(v) for pair in zip(lam.real, lam.imag) for v in pair]
                    + [float(tr.real), float(tr.imag)]
                )
            cols = (["n", "e_per_n"]
                    + [f"{p}_lambda{a}" for a in (1, 2, 3) for p in ("re", "im")]
                    + ["re_trace", "im_trace"])
            path = write_csv(_subspace_csv_path(out, n, kind),
                             f"projections-{kind}", cols, rows)
            manifest.add(path)
    print(f"N={n}: {len(subs)} subspaces, {len(subs.unpaired_r1)} unpaired r=1 levels")
    manifest.write()
    return EXIT_OK


def cmd_classical(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, "classical", cfg)
    energies = (np.array([float(t) for t in args.energies.split(",")])
                if args.energies else _grid(cfg))
    count = args.count or cfg.trajectories
    t_max = args.t_max or cfg.t_max
    rows = []
    with manifest.stage("ensembles"):
        for ei, e in enumerate(energies):
            try:
                results = classical.run_ensemble(
                    float(e), cfg.hopping, cfg.interaction, count=count,
                    seed=cfg.seed + 1000 * ei, delta_e=cfg.traj_delta_e,
                    t_max=t_max, mode=cfg.mode, transient=cfg.transient,
                    with_chaos=not args.no_chaos, workers=cfg.workers,
                )
            except RuntimeError as exc:
                log.warning("skipping E/N=%.3f: %s", e, exc)
                continue
            for k, r in enumerate(results):
                rows.append([
                    float(e), k, r.energy_per_particle,
                    float(r.avg_imbalance.real), float(r.avg_imbalance.imag),
                    r.avg_current, r.avg_hopping12, r.chaos_metric,
                    r.chaotic, r.breaks_rotation, r.breaks_reflection,
                    r.valid, r.energy_drift, r.norm_drift,
                ])
            frac_c = classical.chaos_fraction(results)
            frac_i, frac_s = classical.symmetry_breaking_fraction(results)
            print(f"E/N={e:+.3f}: chaos {frac_c:.2f}, "
                  f"SB rotation {frac_i:.2f}, reflection {frac_s:.2f}")
    with manifest.stage("write"):
        path = write_csv(
            out / f"classical_{cfg.mode}.csv", "trajectories",
            ["e_target", "traj", "e_per_n", "re_avg_imbalance",
             "im_avg_imbalance", "avg_current", "avg_hopping12", "chaos_metric",
             "chaotic", "breaks_rotation", "breaks_reflection", "valid",
             "energy_drift", "norm_drift"],
            rows,
        )
        manifest.add(path)
    manifest.write()
    return EXIT_OK


def cmd_mc(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, "mc", cfg)
    grid = _grid(cfg)
    kinds = [args.kind] if args.kind else list(observables.KINDS)
    samples = args.samples or cfg.mc_samples

    def one(job):
        kind, i, e = job
        return kind, microcan.mc_average(
            kind, float(e), cfg.hopping, cfg.interaction,
            delta_e=cfg.mc_delta_e, n_samples=samples,
            seed=cfg.seed + 7919 * i, domain=cfg.mc_domain,
        )

    jobs = [(kind, i, e) for kind in kinds for i, e in enumerate(grid)]
    with manifest.stage("sampling"):
        if cfg.workers > 1:
            with concurrent.futures.ThreadPoolExecutor(cfg.workers) as pool:
                done = list(pool.map(one, jobs))
        else:
            done = [one(j) for j in jobs]
    with manifest.stage("write"):
        for kind in kinds:
            ests = [est for k, est in done if k == kind]
            rows = [[est.e_over_n, float(np.real(est.value)),
                     float(np.imag(est.value)), est.stderr, est.accepted,
                     est.total, int(est.low_confidence)] for est in ests]
            path = write_csv(
                out / f"mc_{kind}.csv", f"mc-{kind}",
                ["e_per_n", "re_value", "im_value", "stderr", "accepted",
                 "total", "low_confidence"],
                rows,
            )
            manifest.add(path)
    manifest.write()
    return EXIT_OK


def cmd_stats(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, "stats", cfg)
    n = args.n or cfg.n_particles
    params = ModelParams(n, cfg.hopping, cfg.interaction)
    with manifest.stage("diagonalize"):
        sector_levels = {}
        for label in (SectorLabel(0, 1), SectorLabel(0, -1), SECTOR_PAIR):
            spec, _ = cached_spectrum(cache_dir, params, label, manifest)
            sector_levels[str(label)] = spec.energies
    with manifest.stage("fit"):
        profile = rmtstats.chaos_profile(
            sector_levels, n, window_width=cfg.window_width
        )
    with manifest.stage("write"):
        rows = [[e, 1.0 - frac, count, frac] for e, frac, count in profile]
        path = write_csv(
            out / f"stats_N{n}.csv", "spacings",
            ["e_per_n", "rho", "count", "chaotic_fraction"], rows,
        )
        manifest.add(path)
    for e, frac, count in profile:
        print(f"E/N={e:+.3f}: chaotic fraction {frac:.2f} ({count} spacings)")
    manifest.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def _load_mc_grid(out: Path, kind: str) -> microcan.McGrid:
    _, rows = read_csv(out / f"mc_{kind}.csv", f"mc-{kind}", "mc")
    ests = [
        microcan.McEstimate(kind, float(r[0]),
                            complex(float(r[1]), float(r[2])), float(r[3]),
                            int(r[4]), int(r[5]), 0.0)
        for r in rows
    ]
    return microcan.McGrid(kind, ests)


def _load_tables(out: Path, n: int) -> dict[str, observables.ProjectionTable]:
    tables = {}
    for kind in observables.KINDS:
        _, rows = read_csv(_subspace_csv_path(out, n, kind),
                           f"projections-{kind}", f"subspaces --n {n}")
        e = np.array([float(r[1]) for r in rows])
        lam = np.array(
            [[complex(float(r[2 + 2 * a]), float(r[3 + 2 * a])) for a in range(3)]
             for r in rows]
        )
        tr = np.array([complex(float(r[8]), float(r[9])) for r in rows])
        tables[kind] = observables.ProjectionTable(
            kind, e, np.zeros((len(e), 3, 3), complex), lam, tr
        )
    return tables


def _fig1(cfg: RunConfig, out: Path, manifest: Manifest):
    n = cfg.n_particles
    tables = _load_tables(out, n)
    mc_h12 = _load_mc_grid(out, "hopping12")
    _, stat_rows = read_csv(out / f"stats_N{n}.csv", "spacings", f"stats --n {n}")
    _, cls_rows = read_csv(out / f"classical_{cfg.mode}.csv", "trajectories",
                           "classical")

    def safe_mc(e):
        g = mc_h12.grid
        return mc_h12(float(np.clip(e, g[0], g[-1])))

    recs = geth.deviation_records(tables["hopping12"], safe_mc)
    dev_rows = [[r.energy_per_particle, r.delta_trace, r.delta_lambda]
                for r in recs]
    for kind in ("imbalance", "current"):
        t = tables[kind]
        for i, rec in enumerate(geth.deviation_records(t, 0.0)):
            dev_rows[i].extend([rec.delta_trace, rec.delta_lambda])

    # classical fractions per target energy
    by_e: dict[float, list] = {}
    for r in cls_rows:
        by_e.setdefault(float(r[0]), []).append(r)
    frac_rows = []
    for e in sorted(by_e):
        rows = [r for r in by_e[e] if r[11] == "1"]
        if not rows:
            continue
        frac_rows.append([
            e,
            float(np.mean([r[8] == "1" for r in rows])),
            float(np.mean([r[9] == "1" for r in rows])),
            float(np.mean([r[10] == "1" for r in rows])),
        ])

    path = write_csv(
        out / "fig1.csv", "fig1-deviations",
        ["e_per_n", "h12_delta_trace", "h12_delta_lambda",
         "imb_delta_trace", "imb_delta_lambda",
         "cur_delta_trace", "cur_delta_lambda"],
        dev_rows,
    )
    manifest.add(path)
    path = write_csv(
        out / "fig1_fractions.csv", "fig1-fractions",
        ["e_per_n", "chaos_fraction", "sb_rotation", "sb_reflection"],
        frac_rows,
    )
    manifest.add(path)

    fig = svgplot.Figure(title=f"deviations and fractions, N={n}",
                         x_label="E/N", y_label="deviation / fraction",
                         y_scale="log")
    e = np.array([r[0] for r in dev_rows])
    fig.scatter(e, [max(r[2], 1e-12) for r in dev_rows],
                label="max|lambda-T/3| h12", radius=1.6)
    fig.scatter(e, [max(r[3], 1e-12) for r in dev_rows],
                label="|T/3| imbalance", radius=1.6)
    fig.scatter(e, [max(r[6], 1e-12) for r in dev_rows],
                label="max|lambda| current", radius=1.6)
    if frac_rows:
        fe = [r[0] for r in frac_rows]
        fig.line(fe, [max(r[1], 1e-12) for r in frac_rows], label="chaos fraction")
        fig.line(fe, [max(r[2], 1e-12) for r in frac_rows], label="SB rotation")
        fig.line(fe, [max(r[3], 1e-12) for r in frac_rows], label="SB reflection")
    sx = [float(r[0]) for r in stat_rows]
    if sx:
        fig.line(sx, [max(float(r[3]), 1e-12) for r in stat_rows], dash="4,3",
                 label="spacing chaotic frac")
    manifest.add(fig.save(out / "fig1.svg"))


def _fig2(cfg: RunConfig, out: Path, manifest: Manifest):
    n = cfg.n_particles
    tables = _load_tables(out, n)
    _, cls_rows = read_csv(out / f"classical_{cfg.mode}.csv", "trajectories",
                           "classical")
    centers = (-4.2, -2.7)
    rows = []
    for c in centers:
        for kind in ("imbalance", "current"):
            t = tables[kind]
            sel = np.abs(t.energies_per_particle - c) <= cfg.window_width / 2
            for lam in t.eigenvalues[sel].ravel():
                rows.append([c, kind, "quantum", float(lam.real), float(lam.imag)])
        for r in cls_rows:
            if abs(float(r[0]) - c) <= cfg.traj_delta_e and r[11] == "1":
                rows.append([c, "imbalance", "classical",
                             float(r[3]), float(r[4])])
                rows.append([c, "current", "classical", float(r[5]), 0.0])
    path = write_csv(
        out / "fig2.csv", "fig2-clouds",
        ["e_center", "kind", "source", "re", "im"], rows,
    )
    manifest.add(path)

    fig = svgplot.Figure(title=f"imbalance clouds, N={n}",
                         x_label="Re I/N", y_label="Im I/N")
    for c, color_q, color_c in ((centers[0], "#1f6fb4", "#d45500"),
                                (centers[1], "#2e8b57", "#8b2e8b")):
        q = [(r[3], r[4]) for r in rows
             if r[0] == c and r[1] == "imbalance" and r[2] == "quantum"]
        cl = [(r[3], r[4]) for r in rows
              if r[0] == c and r[1] == "imbalance" and r[2] == "classical"]
        if q:
            fig.scatter(*zip(*q), color=color_q, label=f"quantum E/N={c}")
        if cl:
            fig.scatter(*zip(*cl), color=color_c, radius=3.5,
                        label=f"classical E/N={c}")
    manifest.add(fig.save(out / "fig2.svg"))


def _fig3(cfg: RunConfig, out: Path, manifest: Manifest):
    shell_lo, shell_hi = cfg.shell_min, cfg.shell_max
    mc_h12 = _load_mc_grid(out, "hopping12")
    sigma: dict[str, list[float]] = {k: [] for k in observables.KINDS}
    for n in cfg.sizes:
        tables = _load_tables(out, n)
        e = tables["hopping12"].energies_per_particle
        subset = np.nonzero((e >= shell_lo) & (e <= shell_hi))[0]
        for kind in observables.KINDS:
            ref = mc_h12 if kind == "hopping12" else 0.0
            pop = geth.deviation_population(tables[kind], ref, subset)
            sigma[kind].append(float(np.std(pop)))
    fits = {k: geth.scaling_fit(k, cfg.sizes, v) for k, v in sigma.items()}
    rows = [[n] + [sigma[k][i] for k in observables.KINDS]
            for i, n in enumerate(cfg.sizes)]
    path = write_csv(
        out / "fig3.csv", "fig3-scaling",
        ["n"] + [f"sigma_{k}" for k in observables.KINDS], rows,
    )
    manifest.add(path)
    fit_rows = [[k, f.exponent, f.amplitude, f.residual]
                for k, f in fits.items()]
    path = write_csv(out / "fig3_fits.csv", "fig3-fits",
                     ["kind", "exponent", "amplitude", "residual"], fit_rows)
    manifest.add(path)

    fig = svgplot.Figure(title="deviation scaling", x_label="N",
                         y_label="sigma", x_scale="log", y_scale="log")
    ns = np.array(cfg.sizes, dtype=float)
    for kind in observables.KINDS:
        f = fits[kind]
        fig.scatter(ns, sigma[kind], label=f"{kind} ({f.exponent:+.2f})")
        fig.line(ns, f.amplitude * ns**f.exponent, dash="4,3")
    manifest.add(fig.save(out / "fig3.svg"))
    for k, f in fits.items():
        print(f"{k}: sigma ~ N^{f.exponent:+.3f} (residual {f.residual:.3g})")


def cmd_figure(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, f"figure {args.which}", cfg)
    builder = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3}[args.which]
    with manifest.stage(args.which):
        builder(cfg, out, manifest)
    manifest.write()
    return EXIT_OK


def cmd_report(cfg: RunConfig, args, out: Path, cache_dir: Path) -> int:
    manifest = Manifest(out, "report", cfg)
    n = cfg.n_particles
    with manifest.stage("tables"):
        _, tables = build_tables(cfg, cache_dir, n, manifest)
    with manifest.stage("classify"):
        windows = geth.classify_regions(
            tables["imbalance"], tables["current"],
            window_width=cfg.window_width, min_count=cfg.min_window_count,
        )
    scaling = None
    exceedance = None
    fits_path = out / "fig3_fits.csv"
    if fits_path.exists():
        _, rows = read_csv(fits_path, "fig3-fits", "figure fig3")
        scaling = {r[0]: {"exponent": float(r[1]), "amplitude": float(r[2]),
                          "residual": float(r[3])} for r in rows}
    shell = spectra.EnergyShell(
        0.5 * (cfg.shell_min + cfg.shell_max),
        0.5 * (cfg.shell_max - cfg.shell_min),
    )
    e = tables["imbalance"].energies_per_particle
    in_shell = np.nonzero(np.abs(e - shell.center) <= shell.halfwidth)[0]
    pop = geth.deviation_population(tables["imbalance"], 0.0, in_shell)
    exceedance = {
        str(b): c
        for b, c in geth.exceedance_counts(
            pop, (0.01, 0.05, geth.SB_BOUND_IMBALANCE)
        ).items()
    }

    doc = {
        "n_particles": n,
        "windows": [
            {
                "e_per_n": w.center,
                "count": w.count,
                "label": w.label,
                "fraction_imbalance": w.fraction_imbalance,
                "fraction_current": w.fraction_current,
                "max_imbalance": w.max_imbalance,
                "max_current": w.max_current,
            }
            for w in windows
        ],
        "scaling": scaling,
        "exceedance_imbalance_shell": exceedance,
    }
    with manifest.stage("write"):
        path = out / "report.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
        manifest.add(path)

        lines = [f"region report, N={n}", ""]
        for w in windows:
            lines.append(
                f"  E/N={w.center:+.2f}  {w.label:<20s} "
                f"count={w.count:<5d} fI={w.fraction_imbalance:.2f} "
                f"fC={w.fraction_current:.2f}"
            )
        if scaling:
            lines.append("")
            for k, s in scaling.items():
                lines.append(f"  scaling {k}: exponent {s['exponent']:+.3f}")
        text_path = out / "report.txt"
        text_path.write_text("\n".join(lines) + "\n")
        manifest.add(text_path)
    print("\n".join(lines[2:]) if len(lines) > 2 else "no windows")
    manifest.write()
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gethlab",
        description="trimer thermalization experiments: compute, cache, plot",
    )
    parser.add_argument("--config", type=Path, help="flat key=value config file")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--workers", type=int, help="worker pool size")
    parser.add_argument("--cache", type=Path, help="cache directory")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--mode", choices=("fast", "paper"),
                        help="integration mode")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="diagonalize and cache sector spectra")
    p.add_argument("--n", type=int, help="override particle number")

    p = sub.add_parser("subspaces",
                       help="assemble subspaces and projection tables")
    p.add_argument("--n", type=int, help="override particle number")

    p = sub.add_parser("classical", help="trajectory ensembles on an energy grid")
    p.add_argument("--energies", help="comma-separated E/N list (default: grid)")
    p.add_argument("--count", type=int, help="trajectories per energy")
    p.add_argument("--t-max", type=float, dest="t_max")
    p.add_argument("--no-chaos", action="store_true",
                   help="skip the chaos metric (halves runtime)")

    p = sub.add_parser("mc", help="microcanonical Monte Carlo shell averages")
    p.add_argument("--kind", choices=observables.KINDS)
    p.add_argument("--samples", type=int)

    p = sub.add_parser("stats", help="level spacing chaos profile")
    p.add_argument("--n", type=int, help="override particle number")

    p = sub.add_parser("figure", help="render one figure from prior outputs")
    p.add_argument("which", choices=("fig1", "fig2", "fig3"))

    sub.add_parser("report", help="region classification JSON and summary")
    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "subspaces": cmd_subspaces,
    "classical": cmd_classical,
    "mc": cmd_mc,
    "stats": cmd_stats,
    "figure": cmd_figure,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config.load(args.config) if args.config else RunConfig()
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.workers is not None:
            overrides["workers"] = args.workers
        if args.mode is not None:
            overrides["mode"] = args.mode
        if args.cache is not None:
            overrides["cache_dir"] = str(args.cache)
        if args.out is not None:
            overrides["out_dir"] = str(args.out)
        if overrides:
            cfg = replace(cfg, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(cfg.out_dir)
    # the environment variable wins over the config file; the flag wins over both
    if args.cache is not None:
        cache_dir = Path(args.cache)
    elif cfg.cache_dir and "GETHLAB_CACHE" not in os.environ:
        cache_dir = Path(cfg.cache_dir)
    else:
        cache_dir = cache.default_cache_dir()

    try:
        return _COMMANDS[args.command](cfg, args, out, cache_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except MissingPrerequisite as exc:
        print(f"missing prerequisite: {exc}", file=sys.stderr)
        return EXIT_MISSING
    except (EigensolverError, FloatingPointError, np.linalg.LinAlgError,
            RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
