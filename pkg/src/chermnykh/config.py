"""Run configuration: INI file plus command-line overrides.

Layout::

    [params]      mu, q1 | epsilon, A2, Mb, flatness_a, core_b, rc_override
    [run]         out, threads, seed, format
    [stability]   mus, A2s, Mbs, q1s, surface, surface_q1s, surface_A2s, surface_Mbs, tol
    [zvc]         levels, bounds, resolution
    [orbit]       start, x, y, vx, vy, t_end, stride, rel_tol, abs_tol
    [normalform]  (no keys)

List values are comma separated; ``lo:hi:count`` expands to an inclusive
linspace.  Zero-velocity levels may be numbers or ``L<i>[+-delta]`` tokens
relative to an equilibrium level.
"""

from __future__ import annotations

import configparser
import math
import os
import re
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .model import build_system

_SECTIONS = {
    "params": {"mu", "q1", "epsilon", "A2", "Mb", "flatness_a", "core_b", "rc_override"},
    "run": {"out", "threads", "seed", "format"},
    "stability": {"mus", "A2s", "Mbs", "q1s", "surface", "surface_q1s", "surface_A2s", "surface_Mbs", "tol"},
    "zvc": {"levels", "bounds", "resolution"},
    "orbit": {"start", "x", "y", "vx", "vy", "t_end", "stride", "rel_tol", "abs_tol"},
    "normalform": set(),
}

_LEVEL = re.compile(r"^(L[1-5])\s*([+-]\s*[0-9.eE+-]+)?$")


@dataclass
class ModelInputs:
    mu: float | None = None
    q1: float | None = None
    epsilon: float | None = None
    A2: float = 0.0
    Mb: float = 0.0
    flatness_a: float = 0.0
    core_b: float = 0.0
    rc_override: float | None = None

    def resolved_q1(self):
        if self.q1 is not None and self.epsilon is not None:
            raise ConfigError("q1 and epsilon are mutually exclusive")
        if self.epsilon is not None:
            return 1.0 - self.epsilon
        return 1.0 if self.q1 is None else self.q1

    def build(self):
        if self.mu is None:
            raise ConfigError("mu is required")
        q1 = self.resolved_q1()
        if not 0.0 <= q1 <= 1.0:
            raise ConfigError(f"q1 must lie in [0, 1], got {q1}")
        try:
            return build_system(self.mu, q1, self.A2, self.Mb, self.flatness_a, self.core_b, self.rc_override)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


@dataclass
class RunConfig:
    model: ModelInputs = field(default_factory=ModelInputs)
    out: str = "."
    threads: int | None = None
    seed: int = 0
    format: str = "json"
    stability: dict = field(default_factory=dict)
    zvc: dict = field(default_factory=dict)
    orbit: dict = field(default_factory=dict)


def parse_float(text, key):
    try:
        return float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None


def parse_list(text, key):
    """Comma list of numbers, or ``lo:hi:count`` for an inclusive linspace."""
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"{key}: range must be lo:hi:count")
        lo, hi = parse_float(parts[0], key), parse_float(parts[1], key)
        try:
            count = int(parts[2])
        except ValueError:
            raise ConfigError(f"{key}: count must be an integer") from None
        if count < 1:
            raise ConfigError(f"{key}: count must be positive")
        return [float(v) for v in np.linspace(lo, hi, count)]
    items = [s for s in (t.strip() for t in text.split(",")) if s]
    if not items:
        raise ConfigError(f"{key}: empty list")
    return [parse_float(s, key) for s in items]


def parse_bool(text, key):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: expected a boolean, got {text!r}")


def parse_level(token):
    """Number, or ('L4', delta) for a level relative to an equilibrium."""
    token = token.strip()
    m = _LEVEL.match(token)
    if m:
        delta = m.group(2)
        return m.group(1), (float(delta.replace(" ", "")) if delta else 0.0)
    return parse_float(token, "zvc.levels")


def read_config_file(path):
    """Parse an INI file into a dict of sections; unknown sections or keys are errors."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep key case (A2, Mb)
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    out = {}
    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in _SECTIONS[section]:
                raise ConfigError(f"unknown key {section}.{key}")
        out[section] = dict(cp[section])
    base = os.path.dirname(os.path.abspath(path))
    if "out" in out.get("run", {}):
        out["run"]["out"] = os.path.normpath(os.path.join(base, out["run"]["out"]))
    return out


def assemble(sections, overrides):
    """Merge file sections with flag overrides (flags win) into a RunConfig."""
    cfg = RunConfig()
    params = dict(sections.get("params", {}))
    model_fields = {f.name for f in fields(ModelInputs)}
    for key, value in overrides.items():
        if value is not None and key in model_fields:
            params[key] = value
    if overrides.get("q1") is not None:
        params.pop("epsilon", None)
    if overrides.get("epsilon") is not None:
        params.pop("q1", None)
    for key, value in params.items():
        setattr(cfg.model, key, parse_float(value, f"params.{key}"))

    run = dict(sections.get("run", {}))
    for key in ("out", "threads", "format"):
        if overrides.get(key) is not None:
            run[key] = overrides[key]
    cfg.out = os.path.abspath(str(run.get("out", ".")))
    if "threads" in run:
        try:
            cfg.threads = int(run["threads"])
        except ValueError:
            raise ConfigError("threads must be an integer") from None
        if cfg.threads < 1:
            raise ConfigError("threads must be positive")
    if "seed" in run:
        try:
            cfg.seed = int(run["seed"])
        except ValueError:
            raise ConfigError("seed must be an integer") from None
    cfg.format = str(run.get("format", "json"))
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"format must be json or csv, got {cfg.format!r}")
    cfg.stability = dict(sections.get("stability", {}))
    cfg.zvc = dict(sections.get("zvc", {}))
    cfg.orbit = dict(sections.get("orbit", {}))
    return cfg


# ---------------------------------------------------------------- serialization


def fmt_float(x):
    """17 significant digits: round-trips every double."""
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    return format(x, ".17g")


def _plain(obj):
    if hasattr(obj, "__dataclass_fields__"):
        return {f.name: _plain(getattr(obj, f.name)) for f in fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def dumps(obj, indent=2):
    """Deterministic JSON with floats at 17 significant digits; dict insertion order kept."""
    import json

    def emit(o, level):
        pad, inner = " " * (indent * level), " " * (indent * (level + 1))
        if o is None:
            return "null"
        if isinstance(o, bool):
            return "true" if o else "false"
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            return fmt_float(o)
        if isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, dict):
            if not o:
                return "{}"
            body = ",\n".join(f"{inner}{json.dumps(k)}: {emit(v, level + 1)}" for k, v in o.items())
            return "{\n" + body + "\n" + pad + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in o):
                return "[" + ", ".join(emit(v, level + 1) for v in o) + "]"
            body = ",\n".join(inner + emit(v, level + 1) for v in o)
            return "[\n" + body + "\n" + pad + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return emit(_plain(obj), 0) + "\n"
