"""Scenario configuration: flat ``key = value`` files with dimensionless keys.

Every time is in units of the pulse length T and every rate is multiplied
by T. Precedence: defaults, then preset, then config file, then ``--set``
overrides.
"""

from dataclasses import dataclass, fields, replace
import math

from .errors import DomainError
from .model import SystemParams


class ConfigError(ValueError):
    """Unparseable or invalid scenario configuration."""


def _floats(text):
    return tuple(float(x) for x in str(text).replace(";", ",").split(",") if x.strip())


@dataclass(frozen=True)
class ScenarioConfig:
    # system
    gamma_T: float = 4.0
    g_sqrt_n_T: float = 20.0
    gamma_a_T: float = 0.0
    gamma_c_T: float = 0.0
    n_atoms: float = 1.0
    # input packet and grid
    pulse: str = "sech"
    delay: float = 0.0
    pulse_file: str = ""
    t_start: float = -10.0
    t_end: float = 40.0
    n_points: int = 8192
    # control
    schedule: str = "analytic"  # analytic | solved | file
    schedule_file: str = ""
    cos_theta_start: float = math.nan
    margin: float = 100.0
    # cycle
    load_end: float = 15.0
    hold: float = 0.0
    holds: tuple = ()
    # model selection and the mode bank
    model: str = "reduced"  # reduced | full | both
    n_modes: int = 1024
    delta_max_T: float = 40.0
    # scans
    gamma_eff_T: tuple = (0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0)
    fig3_dt: float = 0.005
    delays: tuple = (0.01, 0.0147, 0.0215, 0.0316, 0.0464, 0.0681, 0.1)
    n_qubits: int = 10
    seed: int = 0
    workers: int = 1
    # classical oracle
    mirror_R: float = 0.99
    mirror_zeta: float = 1.0
    tau_c: float = 0.01

    _CHOICES = {
        "pulse": ("sech", "gaussian", "hyper_gaussian", "file"),
        "schedule": ("analytic", "solved", "file"),
        "model": ("reduced", "full", "both"),
    }

    def __post_init__(self):
        for key, allowed in self._CHOICES.items():
            if getattr(self, key) not in allowed:
                raise ConfigError(f"{key} must be one of {', '.join(allowed)}")
        if self.n_points < 16:
            raise ConfigError("n_points must be at least 16")
        if self.t_end <= self.t_start:
            raise ConfigError("t_end must exceed t_start")
        if self.hold < 0 or any(h < 0 for h in self.holds):
            raise ConfigError("hold durations must be >= 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.pulse == "file" and not self.pulse_file:
            raise ConfigError("pulse = file needs pulse_file")
        if self.schedule == "file" and not self.schedule_file:
            raise ConfigError("schedule = file needs schedule_file")
        try:
            self.params()
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def params(self):
        return SystemParams.from_dimensionless(
            self.gamma_T, self.g_sqrt_n_T, self.gamma_a_T, self.gamma_c_T, self.n_atoms)

    def updated(self, items):
        return replace(self, **_coerce(items))

    def as_items(self):
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = ",".join(repr(x) for x in v) if isinstance(v, tuple) else v
        return out


_TYPES = {f.name: f.type for f in fields(ScenarioConfig)}


def _coerce(items):
    out = {}
    for key, raw in items.items():
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}")
        kind = _TYPES[key]
        try:
            if kind is float:
                out[key] = float(raw)
            elif kind is int:
                out[key] = int(raw)
            elif kind is tuple:
                out[key] = _floats(raw) if isinstance(raw, str) else tuple(raw)
            else:
                out[key] = str(raw).strip()
        except (TypeError, ValueError):
            raise ConfigError(f"bad value for {key}: {raw!r}") from None
    return out


def parse_lines(lines, source="<config>"):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    items = {}
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{n}: expected 'key = value'")
        items[key.strip()] = value.strip()
    return items


def read_config_file(path):
    with open(path) as fh:
        items = parse_lines(fh, str(path))
    if not items:
        raise ConfigError(f"{path}: configuration file is empty")
    return items


PRESETS = {
    # constant mixing angle scan; gamma_T must exceed the largest gamma_eff_T
    "fig3": {"gamma_T": "100", "pulse": "sech"},
    "fig4": {"gamma_T": "4", "pulse": "sech", "schedule": "analytic"},
    "fig4-gaussian": {"gamma_T": "4", "pulse": "gaussian", "schedule": "analytic"},
    "fig4-hyper": {"gamma_T": "4", "pulse": "hyper_gaussian", "schedule": "analytic"},
    "fig5": {"gamma_T": "4", "pulse": "sech", "load_end": "15", "hold": "0"},
}


def build_config(preset=None, path=None, overrides=()):
    """Defaults, then ``preset``, then ``path``, then ``key=value`` overrides."""
    items = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}")
        items.update(PRESETS[preset])
    if path is not None:
        items.update(read_config_file(path))
    for text in overrides:
        items.update(parse_lines([text], "--set"))
    return ScenarioConfig().updated(items)
