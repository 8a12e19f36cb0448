"""Flat key=value run configuration.

The on-disk form is one ``key = value`` pair per line, blank lines and
``#`` comments ignored, no nesting. Every key has a default; unknown keys
are an error so typos cannot silently change a run. ``dumps(loads(text))``
round-trips losslessly because floats are written with repr.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    """Invalid configuration file or value (CLI exit code 2)."""


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


@dataclass
class RunConfig:
    """All knobs for one experiment run; see field comments for meanings."""

    # model
    n_particles: int = 120
    hopping: float = 1.0
    interaction: float = -5.0
    # particle numbers for the finite-size scaling sweep
    sizes: tuple[int, ...] = (40, 60, 80, 120, 160)
    # run control
    seed: int = 0
    workers: int = 1
    mode: str = "fast"              # fast | paper
    cache_dir: str = ""             # empty = GETHLAB_CACHE or ~/.cache/gethlab
    out_dir: str = "out"
    # energy shell for scaling statistics (per particle)
    shell_min: float = -3.1
    shell_max: float = -2.3
    # window width for region classification and spacing statistics
    window_width: float = 0.1
    min_window_count: int = 5
    # classical ensembles
    trajectories: int = 200
    t_max: float = 1000.0
    transient: float = 100.0
    traj_delta_e: float = 0.05
    # Monte Carlo shell averages
    mc_samples: int = 100_000_000
    mc_delta_e: float = 0.01
    mc_domain: str = "sphere"       # sphere | ball
    # energy grid (per particle) for classical/mc scans
    grid_min: float = -5.1
    grid_max: float = -0.7
    grid_step: float = 0.2

    def __post_init__(self):
        if self.n_particles <= 0:
            raise ConfigError("n_particles must be positive")
        if any(n <= 0 for n in self.sizes):
            raise ConfigError("all entries of sizes must be positive")
        if self.mode not in ("fast", "paper"):
            raise ConfigError(f"mode must be fast or paper, got {self.mode!r}")
        if self.mc_domain not in ("sphere", "ball"):
            raise ConfigError(f"mc_domain must be sphere or ball, got {self.mc_domain!r}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.shell_min < self.shell_max:
            raise ConfigError("shell_min must be below shell_max")
        if self.window_width <= 0 or self.grid_step <= 0:
            raise ConfigError("window_width and grid_step must be positive")


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _parse_value(name: str, text: str):
    kind = _FIELDS[name].type
    text = text.strip()
    try:
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        if kind == "tuple[int, ...]":
            return _parse_int_list(text)
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def loads(text: str) -> RunConfig:
    """Parse the flat key=value form; unknown keys raise ConfigError."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, val = body.partition("=")
        key = key.strip()
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, val)
    return RunConfig(**values)


def dumps(cfg: RunConfig) -> str:
    """Serialize with one key per line, field order, repr-exact floats."""
    lines = []
    for f in fields(RunConfig):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ",".join(str(x) for x in v)
        lines.append(f"{f.name} = {v!r}" if isinstance(v, float) else f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def load(path: str | Path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def save(cfg: RunConfig, path: str | Path):
    Path(path).write_text(dumps(cfg))
