"""Experiment configuration files.

A configuration is a TOML document. Frequencies are linear and in MHz,
times in microseconds, heating rates in quanta per second. Unknown keys are
rejected with the dotted path of the offending entry.

Example::

    seed = 0

    [trap]
    n_ions = 4
    omega_x_mhz = 0.626
    omega_y_mhz = 0.404
    omega_z_mhz = 1.503

    [raman]
    rabi_mhz = 0.05
    detuning_offset_mhz = 0.010   # above mode `reference_mode`

    [schedule]
    b0_mhz = 0.029
    duration_us = 400
    final_ratio = "optimize"

    [evolution]
    sign = -1
    initial = "+x"
"""
from __future__ import annotations

import copy
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import DetectionModel
from .coupling import DEFAULT_WAVELENGTH, RamanConfig, compute_couplings, gaussian_beam_rabi
from .crystal import YB171_MASS, TrapConfig
from .dynamics.schedule import NoiseModel, RampSchedule
from .errors import ConfigError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

TWO_PI = 2 * np.pi
MHZ = TWO_PI * 1e6
US = 1e-6
AMU = 1.66053906660e-27

SCHEMA = {
    "seed": None,
    "output_dir": None,
    "figure": None,
    "trap": {"n_ions", "omega_x_mhz", "omega_y_mhz", "omega_z_mhz", "mass_amu"},
    "raman": {"rabi_mhz", "rabi_profile", "beam_waist_um", "detuning_mhz",
              "detuning_offset_mhz", "reference_mode", "wavelength_nm", "guard_band_mhz",
              "max_j_mhz"},
    "schedule": {"b0_mhz", "duration_us", "final_ratio", "ramp_alpha_per_us", "direction",
                 "n_samples"},
    "evolution": {"sign", "initial", "target", "integrator_tol", "track_ground",
                  "engine", "mode_index"},
    "analysis": {"manifold", "eps_deg_mhz", "max_manifold", "edge_threshold",
                 "mu_range_mhz"},
    "noise": {"heating_rate", "phonon_cutoff", "initial_nbar", "leakage_tol"},
    "detection": {"fidelity", "shots"},
}

INITIAL_STATES = ("+x", "-x", "+y", "-y", "+z", "-z")


def _get(section, key, default, kind=float):
    value = section.get(key, default)
    if value is None:
        return None
    try:
        if kind is bool:
            if not isinstance(value, bool):
                raise TypeError
            return value
        return kind(value)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{section.name}.{key}: cannot interpret {value!r}") from err


class _Section(dict):
    def __init__(self, name, data):
        super().__init__(data or {})
        self.name = name


def validate_keys(raw):
    for key, value in raw.items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown key {key!r}")
        allowed = SCHEMA[key]
        if allowed is None:
            if isinstance(value, dict):
                raise ConfigError(f"{key}: expected a value, found a table")
            continue
        if not isinstance(value, dict):
            raise ConfigError(f"{key}: expected a table")
        for sub in value:
            if sub not in allowed:
                raise ConfigError(f"unknown key {key}.{sub}")


@dataclass
class RamanSettings:
    """Raman parameters whose final values may depend on the crystal."""

    rabi_mhz: object = 0.05
    rabi_profile: str = "uniform"
    beam_waist_um: float = 25.0
    detuning_mhz: float | None = None
    detuning_offset_mhz: float | None = 0.010
    reference_mode: int = 0
    wavelength_nm: float = DEFAULT_WAVELENGTH * 1e9
    guard_band_mhz: float = 1e-3
    # if set, Rabi frequencies are scaled uniformly so that max|J| hits this value
    max_j_mhz: float | None = None

    def detuning(self, spectrum):
        if self.detuning_mhz is not None:
            return self.detuning_mhz * MHZ
        if not 0 <= self.reference_mode < spectrum.n_modes:
            raise ConfigError(f"raman.reference_mode: {self.reference_mode} out of range")
        return spectrum.frequencies[self.reference_mode] + self.detuning_offset_mhz * MHZ

    def rabi(self, geometry):
        n = geometry.n_ions
        if self.rabi_profile == "gaussian":
            return gaussian_beam_rabi(geometry.positions, float(self.rabi_mhz) * MHZ,
                                      self.beam_waist_um * 1e-6)
        values = np.atleast_1d(np.asarray(self.rabi_mhz, dtype=float)) * MHZ
        if values.size == 1:
            return np.full(n, values[0])
        if values.size != n:
            raise ConfigError(f"raman.rabi_mhz: {values.size} values for {n} ions")
        return values

    def build(self, geometry, spectrum, mass=YB171_MASS) -> RamanConfig:
        raman = RamanConfig(self.rabi(geometry), self.detuning(spectrum),
                            wavelength=self.wavelength_nm * 1e-9)
        if self.max_j_mhz is None:
            return raman
        jm = compute_couplings(spectrum, raman, mass, self.guard_band)
        if jm.max_abs == 0:
            raise ConfigError("raman.max_j_mhz: couplings vanish, cannot rescale")
        raman.rabi = raman.rabi * np.sqrt(self.max_j_mhz * MHZ / jm.max_abs)
        return raman

    @property
    def guard_band(self):
        return self.guard_band_mhz * MHZ


@dataclass
class ScheduleSettings:
    b0_mhz: float = 0.029
    duration_us: float = 300.0
    final_ratio: object = 20.0
    ramp_alpha_per_us: float | None = None
    direction: str = "forward"
    n_samples: int = 101

    @property
    def optimize(self):
        return self.ramp_alpha_per_us is None and self.final_ratio == "optimize"

    @property
    def b0(self):
        return self.b0_mhz * MHZ

    @property
    def duration(self):
        return self.duration_us * US

    def build(self, ramp_alpha=None) -> RampSchedule:
        if ramp_alpha is None:
            if self.ramp_alpha_per_us is not None:
                ramp_alpha = self.ramp_alpha_per_us / US
            elif self.optimize:
                raise ConfigError("schedule.final_ratio: optimized ramp needs couplings")
            else:
                ramp_alpha = (float(self.final_ratio) - 1) / self.duration
        total = 2 * self.duration if self.direction == "round_trip" else self.duration
        return RampSchedule(self.b0, ramp_alpha, self.duration, self.direction,
                            np.linspace(0.0, total, self.n_samples))


@dataclass
class EvolutionSettings:
    sign: int = 1
    initial: str = "-x"
    # "ground": lowest states of sign * H; "top": highest ones
    target: str = "ground"
    integrator_tol: float = 1e-9
    track_ground: bool = True
    engine: str = "closed"
    mode_index: int = 0


@dataclass
class AnalysisSettings:
    manifold: str = "classical"
    eps_deg_mhz: float | None = None
    max_manifold: int = 16
    edge_threshold: float = 0.2
    mu_range_mhz: list | None = None


@dataclass
class ExperimentConfig:
    trap: TrapConfig
    raman: RamanSettings
    schedule: ScheduleSettings
    evolution: EvolutionSettings
    analysis: AnalysisSettings
    noise: NoiseModel | None = None
    detection: dict | None = None
    output_dir: str = "out"
    seed: int = 0
    figure: str | None = None
    raw: dict = field(default_factory=dict)

    def detection_model(self, shots=None):
        if self.detection is None:
            return None
        n_shots = self.detection.get("shots") if shots is None else shots
        if not n_shots:
            return None
        return DetectionModel.uniform(self.trap.n_ions, self.detection["fidelity"],
                                      int(n_shots), self.seed)


def _wrap(section, fn):
    try:
        return fn()
    except ConfigError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigError(f"{section}: {err}") from err


def from_dict(raw: dict) -> ExperimentConfig:
    """Validate and convert a parsed configuration document."""
    raw = copy.deepcopy(raw)
    validate_keys(raw)
    if "trap" not in raw:
        raise ConfigError("missing table 'trap'")
    t = _Section("trap", raw["trap"])
    for key in ("n_ions", "omega_x_mhz", "omega_y_mhz", "omega_z_mhz"):
        if key not in t:
            raise ConfigError(f"missing key trap.{key}")
        if key != "n_ions" and not _get(t, key, None) > 0:
            raise ConfigError(f"trap.{key}: must be positive")
    trap = _wrap("trap", lambda: TrapConfig.from_mhz(
        _get(t, "n_ions", None, int), _get(t, "omega_x_mhz", None),
        _get(t, "omega_y_mhz", None), _get(t, "omega_z_mhz", None),
        mass=_get(t, "mass_amu", YB171_MASS / AMU) * AMU))

    r = _Section("raman", raw.get("raman"))
    rabi = r.get("rabi_mhz", 0.05)
    if isinstance(rabi, list):
        rabi = [float(x) for x in rabi]
    raman = RamanSettings(
        rabi_mhz=rabi,
        rabi_profile=_get(r, "rabi_profile", "uniform", str),
        beam_waist_um=_get(r, "beam_waist_um", 25.0),
        detuning_mhz=_get(r, "detuning_mhz", None),
        detuning_offset_mhz=_get(r, "detuning_offset_mhz", 0.010),
        reference_mode=_get(r, "reference_mode", 0, int),
        wavelength_nm=_get(r, "wavelength_nm", DEFAULT_WAVELENGTH * 1e9),
        guard_band_mhz=_get(r, "guard_band_mhz", 1e-3),
        max_j_mhz=_get(r, "max_j_mhz", None),
    )
    if raman.max_j_mhz is not None and raman.max_j_mhz <= 0:
        raise ConfigError("raman.max_j_mhz: must be positive")
    if raman.rabi_profile not in ("uniform", "gaussian"):
        raise ConfigError("raman.rabi_profile: expected 'uniform' or 'gaussian'")

    s = _Section("schedule", raw.get("schedule"))
    ratio = s.get("final_ratio", 20.0)
    if ratio != "optimize":
        ratio = _get(s, "final_ratio", 20.0)
        if ratio <= 1:
            raise ConfigError("schedule.final_ratio: must exceed 1 or be 'optimize'")
    schedule = ScheduleSettings(
        b0_mhz=_get(s, "b0_mhz", 0.029),
        duration_us=_get(s, "duration_us", 300.0),
        final_ratio=ratio,
        ramp_alpha_per_us=_get(s, "ramp_alpha_per_us", None),
        direction=_get(s, "direction", "forward", str),
        n_samples=_get(s, "n_samples", 101, int),
    )
    for key in ("b0_mhz", "duration_us"):
        if not getattr(schedule, key) > 0:
            raise ConfigError(f"schedule.{key}: must be positive")
    if schedule.ramp_alpha_per_us is not None and not schedule.ramp_alpha_per_us > 0:
        raise ConfigError("schedule.ramp_alpha_per_us: must be positive")
    if schedule.n_samples < 2:
        raise ConfigError("schedule.n_samples: need at least 2 samples")
    if not ratio == "optimize":
        _wrap("schedule", schedule.build)

    e = _Section("evolution", raw.get("evolution"))
    evolution = EvolutionSettings(
        sign=_get(e, "sign", 1, int),
        initial=_get(e, "initial", "-x", str),
        target=_get(e, "target", "ground", str),
        integrator_tol=_get(e, "integrator_tol", 1e-9),
        track_ground=_get(e, "track_ground", True, bool),
        engine=_get(e, "engine", "closed", str),
        mode_index=_get(e, "mode_index", 0, int),
    )
    if evolution.sign not in (1, -1):
        raise ConfigError("evolution.sign: must be +1 or -1")
    if evolution.initial not in INITIAL_STATES:
        raise ConfigError(f"evolution.initial: expected one of {INITIAL_STATES}")
    if evolution.target not in ("ground", "top"):
        raise ConfigError("evolution.target: expected 'ground' or 'top'")
    if evolution.engine not in ("closed", "spin_boson"):
        raise ConfigError("evolution.engine: expected 'closed' or 'spin_boson'")

    a = _Section("analysis", raw.get("analysis"))
    mu_range = a.get("mu_range_mhz")
    if mu_range is not None and (not isinstance(mu_range, list) or len(mu_range) != 3):
        raise ConfigError("analysis.mu_range_mhz: expected [lo, hi, step]")
    analysis = AnalysisSettings(
        manifold=_get(a, "manifold", "classical", str),
        eps_deg_mhz=_get(a, "eps_deg_mhz", None),
        max_manifold=_get(a, "max_manifold", 16, int),
        edge_threshold=_get(a, "edge_threshold", 0.2),
        mu_range_mhz=mu_range,
    )
    if analysis.manifold not in ("classical", "quasi"):
        raise ConfigError("analysis.manifold: expected 'classical' or 'quasi'")

    noise = None
    if "noise" in raw:
        nz = _Section("noise", raw["noise"])
        noise = _wrap("noise", lambda: NoiseModel(
            _get(nz, "heating_rate", 0.0), _get(nz, "phonon_cutoff", 15, int),
            _get(nz, "initial_nbar", 0.0), _get(nz, "leakage_tol", 1e-3)))

    detection = None
    if "detection" in raw:
        d = _Section("detection", raw["detection"])
        detection = {"fidelity": _get(d, "fidelity", 1.0),
                     "shots": _get(d, "shots", 0, int)}
        _wrap("detection", lambda: DetectionModel.uniform(
            trap.n_ions, detection["fidelity"], detection["shots"]))

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise ConfigError("seed: expected a non-negative integer")
    return ExperimentConfig(trap, raman, schedule, evolution, analysis, noise, detection,
                            str(raw.get("output_dir", "out")), seed, raw.get("figure"), raw)


def load_config(path) -> ExperimentConfig:
    """Read a TOML config, or the config echoed in a run manifest (``.json``)."""
    path = Path(path)
    try:
        if path.suffix == ".json":
            raw = json.loads(path.read_text())
            if "command" in raw and "config" in raw:
                raw = raw["config"]
        else:
            with path.open("rb") as fh:
                raw = tomllib.load(fh)
    except FileNotFoundError as err:
        raise ConfigError(f"config file not found: {path}") from err
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as err:
        raise ConfigError(f"{path}: {err}") from err
    return from_dict(raw)
