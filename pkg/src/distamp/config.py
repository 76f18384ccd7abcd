"""Run configuration: built-in defaults, ``key = value`` files and flags."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Optional

from .channel import DEFAULT_SEED
from .errors import ConfigError

BACKENDS = ("exact", "kraus", "analytic", "mixture")

# file keys and flag spellings mapped to field names
ALIASES = {
    "n0": "n0", "phi": "phi", "eta": "eta",
    "steps": "n_steps", "n_steps": "n_steps",
    "nmax": "n_max", "n_max": "n_max",
    "seed": "seed", "trials": "trials", "backend": "backend",
    "out": "output_dir", "output_dir": "output_dir",
}


@dataclass(frozen=True)
class RunConfig:
    n0: float = 100.0
    phi: float = 0.05
    eta: float = 1.0
    n_steps: int = 1000
    n_max: Optional[int] = None
    seed: int = DEFAULT_SEED
    trials: int = 10000
    backend: str = "kraus"
    output_dir: str = "."

    def __post_init__(self):
        if not (math.isfinite(self.n0) and self.n0 >= 0):
            raise ConfigError(f"n0 must be a finite non-negative number, got {self.n0}")
        if not math.isfinite(self.phi):
            raise ConfigError("phi must be finite")
        if not (math.isfinite(self.eta) and self.eta >= 0):
            raise ConfigError(f"eta must be non-negative, got {self.eta}")
        if self.n_steps < 1:
            raise ConfigError("steps must be at least 1")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError("nmax must be at least 1")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must fit in 64 unsigned bits")
        if self.backend not in BACKENDS:
            raise ConfigError(f"backend must be one of {', '.join(BACKENDS)}")

    def as_dict(self) -> dict:
        return asdict(self)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(name: str, raw):
    if raw is None:
        return None
    kind = _TYPES[name]
    try:
        if "int" in kind:
            if name == "n_max" and str(raw).strip().lower() in ("", "none", "auto"):
                return None
            text = str(raw).strip()
            return int(text, 0) if isinstance(raw, str) else int(raw)
        if "float" in kind:
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {raw!r}") from exc
    return str(raw).strip()


def parse_config_file(path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in ALIASES:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[ALIASES[key]] = _coerce(ALIASES[key], value)
    return values


def build_config(flags: dict, config_path=None, base: RunConfig | None = None) -> RunConfig:
    """Flags override the config file, which overrides ``base`` defaults."""
    merged = {}
    if config_path:
        merged.update(parse_config_file(config_path))
    for key, value in flags.items():
        if value is not None:
            merged[ALIASES.get(key, key)] = _coerce(ALIASES.get(key, key), value)
    try:
        return replace(base or RunConfig(), **merged)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
