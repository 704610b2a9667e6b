"""INI-style scenario configuration with validation and deterministic hashing.

A run is fully described by four sections: [setup] (species constants),
[run] (atom number, ramp, grids, tolerances), [scenario] (loss constants)
and [output] (directory, formats).  Every field has a default; defaulted
fields are echoed into output metadata so result files are self-describing.
"""
from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field, fields

from .errors import ConfigError
from .lattice import PhysicalSetup, BOHR_RADIUS, RB87_MASS
from .losses import LossScenario, SCENARIO_A, SCENARIO_B

_SETUP_FIELDS = {
    "a_aa": 100.4,
    "a_bb": 100.4,
    "a_ab": 95.0,
    "wavelength": 830e-9,
    "mass": RB87_MASS,
}

_RUN_FIELDS = {
    "n_atoms": 125,
    "v_init": 2.0,
    "v_end": 16.0,
    "v_c": 0.0,            # 0 = auto-compute
    "depth_points": 120,
    "chi_points": 45,
    "time_points": 400,
    "n_max": 11,
    "solver_tol": 1e-10,
    "window_half_width": 0,   # 0 = automatic binomial window
    "sweep_atoms": "125 1000 10000 100000",
}

_SCENARIO_FIELDS = {
    "label": "",
    "K_a2": 0.0, "K_b2": 0.0, "K_ab2": 0.0,
    "K_a3": 0.0, "K_b3": 0.0,
    "a_ab": 0.0,             # 0 = use setup value
    "loss_atoms": "10 31.6 100 316 1000 3162 10000",
}

_OUTPUT_FIELDS = {
    "directory": "out",
    "figures": True,
}

_PRESETS = {"a": SCENARIO_A, "b": SCENARIO_B}


@dataclass
class ScenarioConfig:
    setup: PhysicalSetup
    run: dict
    scenario: LossScenario | None
    output: dict
    defaulted: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    @property
    def loss_atoms(self):
        return [float(x) for x in self.raw["scenario"]["loss_atoms"].split()]

    @property
    def sweep_atoms(self):
        return [int(float(x)) for x in self.raw["run"]["sweep_atoms"].split()]

    def hash(self) -> str:
        """Stable digest of every effective (defaulted or explicit) value."""
        buf = io.StringIO()
        for section in sorted(self.raw):
            for key in sorted(self.raw[section]):
                buf.write(f"{section}.{key}={self.raw[section][key]}\n")
        return hashlib.sha256(buf.getvalue().encode()).hexdigest()[:16]


def _coerce(section, key, default, value):
    try:
        if isinstance(default, bool):
            if str(value).lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(value)
            return str(value).lower() in ("true", "1", "yes")
        if isinstance(default, int) and not isinstance(default, bool):
            return int(str(value))
        if isinstance(default, float):
            return float(str(value))
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError(
            f"[{section}] {key}: cannot parse {value!r} as {type(default).__name__}")


def load_config(path: str | None = None, text: str | None = None) -> ScenarioConfig:
    """Parse and validate a configuration file (or literal text).

    Unknown sections or keys are errors with a field diagnostic; missing
    entries take defaults and are recorded in `defaulted`.
    """
    cp = configparser.ConfigParser()
    try:
        if text is not None:
            cp.read_string(text)
        elif path is not None:
            with open(path) as fh:
                cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}")

    schema = {"setup": _SETUP_FIELDS, "run": _RUN_FIELDS,
              "scenario": _SCENARIO_FIELDS, "output": _OUTPUT_FIELDS}
    for section in cp.sections():
        if section not in schema:
            raise ConfigError(f"unknown section [{section}]")
        for key in cp[section]:
            if key not in schema[section] and not (
                    section == "scenario" and key == "preset"):
                raise ConfigError(f"unknown key '{key}' in [{section}]")

    raw, defaulted = {}, []
    for section, spec in schema.items():
        raw[section] = {}
        for key, default in spec.items():
            if cp.has_option(section, key):
                raw[section][key] = _coerce(section, key, default,
                                            cp.get(section, key))
            else:
                raw[section][key] = default
                defaulted.append(f"{section}.{key}")

    preset = cp.get("scenario", "preset", fallback="").strip().lower()
    if preset:
        if preset not in _PRESETS:
            raise ConfigError(f"unknown scenario preset {preset!r} (use a or b)")
        sc = _PRESETS[preset]
        raw["scenario"].update(label=sc.label, K_a2=sc.K_a2, K_b2=sc.K_b2,
                               K_ab2=sc.K_ab2, K_a3=sc.K_a3, K_b3=sc.K_b3,
                               a_ab=sc.a_ab or 0.0)
        raw["scenario"]["preset"] = preset

    try:
        setup = PhysicalSetup(a_aa=raw["setup"]["a_aa"], a_bb=raw["setup"]["a_bb"],
                              a_ab=raw["setup"]["a_ab"],
                              wavelength=raw["setup"]["wavelength"],
                              mass=raw["setup"]["mass"])
    except Exception as exc:
        raise ConfigError(f"[setup]: {exc}")

    r = raw["run"]
    if r["n_atoms"] < 2:
        raise ConfigError("[run] n_atoms must be >= 2")
    if not r["v_end"] > r["v_init"]:
        raise ConfigError("[run] need v_end > v_init")
    for key in ("depth_points", "chi_points", "time_points"):
        if r[key] < 4:
            raise ConfigError(f"[run] {key} must be >= 4")

    s = raw["scenario"]
    scenario = None
    if any(s[k] > 0 for k in ("K_a2", "K_b2", "K_ab2", "K_a3", "K_b3")):
        scenario = LossScenario(label=s["label"] or "custom",
                                K_a2=s["K_a2"], K_b2=s["K_b2"], K_ab2=s["K_ab2"],
                                K_a3=s["K_a3"], K_b3=s["K_b3"],
                                a_ab=s["a_ab"] or None)
    return ScenarioConfig(setup=setup, run=r, scenario=scenario,
                          output=raw["output"], defaulted=defaulted, raw=raw)


def default_config() -> ScenarioConfig:
    return load_config(text="")
