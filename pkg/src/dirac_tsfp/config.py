"""Run configuration: a flat, sectioned ``key = value`` document.

Schema (every key optional; unknown sections or keys are rejected)::

    [problem]
    preset = bump             ; bump | smooth | free
    potential_csv = pot.csv   ; x,V,A rows; overrides the preset potentials
    epsilon = 1.0             ; (0, 1]
    M = 128                   ; even, >= 4

    [time]
    scheme = strang           ; lie | strang | fourth | ewi | fdm
    tau = 0.01                ; > 0
    t_end = 1.0               ; > 0
    n_steps = 100             ; >= 0, overrides t_end for `run`
    stride = 10               ; >= 1, output sampling in steps

    [sweep]
    schemes = strang, fourth
    taus = 0.1, 0.05, 0.025, 0.0125
    epsilons = 1, 0.5, 0.25, 0.125
    Ms = 8, 16, 32
    T = 1.0                   ; horizons are T / epsilon
    delta0 = 1e-3             ; error bar for crossing times

    [reference]
    M = 128
    tau = 1e-4
    budget = 20000000         ; cap on fine steps per reference

    [output]
    dir = results

Keys left out take the defaults of the command being run.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from .errors import ConfigurationError
from .experiments import DEFAULT_BUDGET, DEFAULT_DELTA0, DEFAULT_STRIDE, REFERENCE_M, REFERENCE_TAU
from .integrators import SchemeKind
from .presets import PRESETS

COMMANDS = ("run", "converge", "sweep-eps", "sweep-h", "growth", "compare")

ALL_SCHEMES = tuple(k.value for k in SchemeKind)


@dataclass(frozen=True)
class RunConfig:
    command: str = "run"
    preset: Optional[str] = None
    potential_csv: Optional[Path] = None
    epsilon: float = 1.0
    M: int = 128
    scheme: str = "strang"
    tau: float = 1e-2
    t_end: float = 1.0
    n_steps: Optional[int] = None
    stride: int = DEFAULT_STRIDE
    schemes: Optional[tuple] = None
    taus: Optional[tuple] = None
    epsilons: Optional[tuple] = None
    Ms: Optional[tuple] = None
    T: float = 1.0
    delta0: float = DEFAULT_DELTA0
    ref_M: int = REFERENCE_M
    ref_tau: float = REFERENCE_TAU
    budget: int = DEFAULT_BUDGET
    out_dir: Optional[Path] = None
    jobs: int = 1
    explicit: frozenset = field(default=frozenset(), compare=False)


def _positive_float(key, text):
    v = _float(key, text)
    if not v > 0:
        raise ConfigurationError(f"{key} must be > 0, got {text!r}")
    return v


def _float(key, text):
    try:
        return float(text)
    except ValueError:
        raise ConfigurationError(f"{key} must be a number, got {text!r}") from None


def _int(key, text):
    try:
        v = float(text)
    except ValueError:
        raise ConfigurationError(f"{key} must be an integer, got {text!r}") from None
    if v != int(v):
        raise ConfigurationError(f"{key} must be an integer, got {text!r}")
    return int(v)


def _epsilon(key, text):
    v = _float(key, text)
    if not 0.0 < v <= 1.0:
        raise ConfigurationError(f"{key} must lie in (0, 1], got {text!r}")
    return v


def _grid_size(key, text):
    v = _int(key, text)
    if v < 4 or v % 2:
        raise ConfigurationError(f"{key} must be an even integer >= 4, got {text!r}")
    return v


def _at_least(lo):
    def parse(key, text):
        v = _int(key, text)
        if v < lo:
            raise ConfigurationError(f"{key} must be an integer >= {lo}, got {text!r}")
        return v

    return parse


def _scheme(key, text):
    name = text.strip().lower()
    if name not in ALL_SCHEMES:
        raise ConfigurationError(f"{key} must be one of {', '.join(ALL_SCHEMES)}, got {text!r}")
    return name


def _preset(key, text):
    name = text.strip()
    if name not in PRESETS:
        raise ConfigurationError(f"{key} must be one of {', '.join(PRESETS)}, got {text!r}")
    return name


def _list_of(item):
    def parse(key, text):
        parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
        if not parts:
            raise ConfigurationError(f"{key} must be a non-empty comma-separated list")
        return tuple(item(key, p.strip()) for p in parts)

    return parse


# (section, key) -> (RunConfig field, parser)
SCHEMA = {
    ("problem", "preset"): ("preset", _preset),
    ("problem", "potential_csv"): ("potential_csv", lambda k, t: Path(t.strip())),
    ("problem", "epsilon"): ("epsilon", _epsilon),
    ("problem", "m"): ("M", _grid_size),
    ("time", "scheme"): ("scheme", _scheme),
    ("time", "tau"): ("tau", _positive_float),
    ("time", "t_end"): ("t_end", _positive_float),
    ("time", "n_steps"): ("n_steps", _at_least(0)),
    ("time", "stride"): ("stride", _at_least(1)),
    ("sweep", "schemes"): ("schemes", _list_of(_scheme)),
    ("sweep", "taus"): ("taus", _list_of(_positive_float)),
    ("sweep", "epsilons"): ("epsilons", _list_of(_epsilon)),
    ("sweep", "ms"): ("Ms", _list_of(_grid_size)),
    ("sweep", "t"): ("T", _positive_float),
    ("sweep", "delta0"): ("delta0", _positive_float),
    ("reference", "m"): ("ref_M", _grid_size),
    ("reference", "tau"): ("ref_tau", _positive_float),
    ("reference", "budget"): ("budget", _at_least(1)),
    ("output", "dir"): ("out_dir", lambda k, t: Path(t.strip())),
}


def parse_config(text: str, command: str = "run") -> RunConfig:
    """Parse and validate a configuration document for ``command``."""
    if command not in COMMANDS:
        raise ConfigurationError(f"command must be one of {', '.join(COMMANDS)}, got {command!r}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    sections = {s for s, _ in SCHEMA}
    values = {}
    for section in parser.sections():
        if section.lower() not in sections:
            raise ConfigurationError(f"unknown section [{section}]; known: {', '.join(sorted(sections))}")
        for key, raw in parser.items(section):
            entry = SCHEMA.get((section.lower(), key.lower()))
            if entry is None:
                raise ConfigurationError(f"unknown key {key!r} in [{section}]")
            name, parse = entry
            values[name] = parse(f"[{section}] {key}", raw)
    if values.get("preset") and values.get("potential_csv"):
        raise ConfigurationError("[problem] preset and potential_csv are mutually exclusive")
    return RunConfig(command=command, explicit=frozenset(values), **values)


def load_config(path: Optional[Path], command: str) -> RunConfig:
    if path is None:
        return parse_config("", command)
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, command)


def with_overrides(cfg: RunConfig, **kwargs) -> RunConfig:
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    return replace(cfg, explicit=cfg.explicit | frozenset(kwargs), **kwargs)
