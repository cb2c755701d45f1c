"""INI scenario files.

A config names its scenario in ``[scenario]`` and may override any
parameter in a section named after that scenario::

    [scenario]
    name = single
    seed = 0

    [single]
    tau_m = 2.55e-3
    decay_k = 0.8

Anything left out falls back to :data:`DEFAULTS`.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .operators import ValidationError

__all__ = ["SCENARIOS", "DEFAULTS", "ScenarioConfig", "load_config"]

_SINGLE = {"delta1": 300.0, "j01": -194.4, "p1": 18000.0, "tau": 1e-6}
_SWEEP_GRID = {"tau_m_start": 2.0e-3, "tau_m_stop": 5.0e-3, "tau_m_step": 1e-6}

DEFAULTS: dict[str, dict] = {
    "single": {**_SINGLE, "tau_m": 2.5176e-3, "n_cycles": 120, "decay_k": None},
    "pps": {
        "delta": 400.0,
        "j01": -194.4,
        "j02": 160.7,
        "j12": 48.3,
        "p": 18000.0,
        "tau": 1e-6,
        "tau_m": 3.0586e-3,
        "n_cycles": 100,
        "decay_k": None,
    },
    "entangled": {
        "delta": 200.0,
        "j12": 100.0,
        "j0": 250.0,
        "p": 18000.0,
        "tau": 0.5e-6,
        "tau_m": 3.0769e-3,
        "n_cycles": 100,
        "decay_k": None,
    },
    "sweep": {**_SINGLE, **_SWEEP_GRID, "n_cycles": 60},
    "appendix_check": {**_SINGLE, **_SWEEP_GRID, "n_cycles": 60, "threshold": 0.9},
    "grape": {
        **_SINGLE,
        "tau_m": 2.5176e-3,
        "k_cycles": 5,
        "duration": 2.5e-3,
        "n_segments": 250,
        "amplitude_bound": 10000.0,
        "max_iterations": 2000,
        "target_fidelity": 0.99,
        "robust": False,
    },
}
SCENARIOS = tuple(DEFAULTS)


def _coerce(key: str, raw: str, default):
    raw = raw.strip()
    if default is None:
        return None if raw.lower() in ("", "none") else float(raw)
    if isinstance(default, bool):
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ValidationError(f"{key}: expected a boolean, got {raw!r}")
    if isinstance(default, int):
        value = float(raw)
        if value != int(value):
            raise ValidationError(f"{key}: expected an integer, got {raw!r}")
        return int(value)
    return float(raw)


@dataclass
class ScenarioConfig:
    scenario: str = "single"
    params: dict = field(default_factory=dict)
    out: str = "results"
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.scenario not in DEFAULTS:
            raise ValidationError(f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}")
        unknown = set(self.params) - set(DEFAULTS[self.scenario])
        if unknown:
            raise ValidationError(f"unknown parameter(s) for {self.scenario}: {', '.join(sorted(unknown))}")
        self.params = {**DEFAULTS[self.scenario], **self.params}
        if self.workers < 1:
            raise ValidationError("workers must be at least 1")

    def resolved(self) -> dict:
        """Everything the run will consume, for the manifest."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "workers": self.workers,
            "out": str(self.out),
            "params": dict(self.params),
        }


def load_config(path=None, scenario: str | None = None) -> ScenarioConfig:
    """Read an INI file; ``scenario`` overrides the file's ``[scenario] name``."""
    parser = configparser.ConfigParser()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ValidationError(f"config file {path} not found")
        parser.read(path)
    head = parser["scenario"] if parser.has_section("scenario") else {}
    name = scenario or head.get("name", "single")
    if name not in DEFAULTS:
        raise ValidationError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    params = {}
    if parser.has_section(name):
        for key, raw in parser[name].items():
            if key not in DEFAULTS[name]:
                raise ValidationError(f"unknown parameter {key!r} in [{name}]")
            params[key] = _coerce(key, raw, DEFAULTS[name][key])
    return ScenarioConfig(
        scenario=name,
        params=params,
        out=head.get("out", "results"),
        seed=int(head.get("seed", 0)),
        workers=int(head.get("workers", 1)),
    )
