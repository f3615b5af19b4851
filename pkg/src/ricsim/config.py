"""Layered configuration: built-in defaults <- config file <- CLI overrides.

The file format is flat ``key = value`` text under ``[section]`` headers.
Unknown sections or keys are rejected, values are range-checked at parse
time, and the resolved configuration round-trips exactly through
``serialize``/``parse`` because floats are written with ``repr``.

The shipped defaults carry the experiment constants (200 mW transmit power,
60/80/50 m geometry, 160 degree incident angle, -174 dBm/Hz noise density,
10 MHz bandwidth, 1000-bit payloads) together with the calibrated channel
parameters (1.4 GHz carrier, exponents 2.0 / 3.6, direct sender->receiver
path enabled, 1.2 us slots) that place both experiments in their reported
operating regimes; ``scripts/calibrate_defaults.py`` reproduces the
calibration.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .errors import ConfigFileError, ConfigSyntaxError, UnknownKeyError, ValueOutOfRangeError
from .geometry import RfConstants, Scenario, dbm_to_watts, place_scenario

__all__ = [
    "ScenarioConfig",
    "SurfaceConfig",
    "OnnConfig",
    "ExperimentConfig",
    "RunConfig",
    "Config",
    "default_config",
    "parse_config",
    "parse_config_text",
    "serialize_config",
    "build_scenario",
]


@dataclass(frozen=True)
class ScenarioConfig:
    d_user_m: float = 60.0
    d_bs_m: float = 80.0
    d_eve_m: float = 50.0
    incident_angle_deg: float = 160.0
    user_spread_deg: float = 2.0
    tx_power_dbm: float = 10.0 * math.log10(200.0)  # 200 mW
    bandwidth_hz: float = 10e6
    noise_density_dbm_hz: float = -174.0
    carrier_freq_hz: float = 1.4e9
    pathloss_exp_rics: float = 2.0
    pathloss_exp_direct: float = 3.6
    direct_user_bs: bool = True
    fading: bool = False


@dataclass(frozen=True)
class SurfaceConfig:
    n_elements: int = 60
    element_grid: tuple[int, ...] = (20, 40, 60, 80, 100)
    mode: str = "RA"
    alpha: float = 0.5
    alpha_grid: tuple[float, ...] = (0.2, 0.5, 0.8)
    n_absorb: int = 4


@dataclass(frozen=True)
class OnnConfig:
    grid: int = 16
    layers: int = 2
    epochs: int = 60
    learning_rate: float = 1.0
    batch_size: int = 32
    lr_decay_every: int = 20
    lr_decay_factor: float = 0.5
    train_per_class: int = 500
    test_per_class: int = 200
    n_samples: int = 1024


@dataclass(frozen=True)
class ExperimentConfig:
    frames: int = 1000
    frame_slots: int = 12
    slot_duration_s: float = 1.2e-6
    payload_bits: float = 1000.0
    fading_trials: int = 10000
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    seed: int = 20260809
    out_dir: str = "results"


@dataclass(frozen=True)
class Config:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    surface: SurfaceConfig = field(default_factory=SurfaceConfig)
    onn: OnnConfig = field(default_factory=OnnConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    run: RunConfig = field(default_factory=RunConfig)

    def with_overrides(self, **section_changes) -> "Config":
        """Replace fields per section, e.g. ``with_overrides(run={"seed": 7})``."""
        updated = {}
        for section, changes in section_changes.items():
            if changes:
                updated[section] = replace(getattr(self, section), **changes)
        return replace(self, **updated) if updated else self


# -- schema ------------------------------------------------------------------

_SECTIONS = {
    "scenario": ScenarioConfig,
    "surface": SurfaceConfig,
    "onn": OnnConfig,
    "experiment": ExperimentConfig,
    "run": RunConfig,
}

_INT_LIST = ("surface", "element_grid")
_FLOAT_LIST = ("surface", "alpha_grid")


def _parse_value(section: str, key: str, raw: str, kind):
    loc = f"{section}.{key}"
    raw = raw.strip()
    try:
        if kind is bool:
            low = raw.lower()
            if low in ("true", "yes", "1", "on"):
                return True
            if low in ("false", "no", "0", "off"):
                return False
            raise ValueError(raw)
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind is str:
            return raw
        if kind == "int_list":
            return tuple(int(v) for v in raw.split(",") if v.strip())
        if kind == "float_list":
            return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigSyntaxError(f"{loc}: cannot parse {raw!r} as {kind}") from exc
    raise AssertionError(f"unhandled kind {kind}")


def _field_kind(section: str, name: str, annotated_type):
    if (section, name) == _INT_LIST:
        return "int_list"
    if (section, name) == _FLOAT_LIST:
        return "float_list"
    if annotated_type in ("bool", bool):
        return bool
    if annotated_type in ("int", int):
        return int
    if annotated_type in ("float", float):
        return float
    return str


def _render_value(section: str, name: str, value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def default_config() -> Config:
    return Config()


def parse_config(path=None, overrides: dict | None = None) -> Config:
    """Resolve defaults <- optional file <- optional overrides, validating all."""
    if path is None:
        text = ""
    else:
        p = Path(path)
        if not p.exists():
            raise ConfigFileError(f"config file not found: {p}")
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigFileError(f"cannot read config file {p}: {exc}") from exc
    return parse_config_text(text, overrides)


def parse_config_text(text: str, overrides: dict | None = None) -> Config:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigSyntaxError(f"malformed config: {exc}") from exc

    section_values: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise UnknownKeyError(section)
        cls = _SECTIONS[section]
        known = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, raw in parser.items(section):
            if key not in known:
                raise UnknownKeyError(f"{section}.{key}")
            values[key] = _parse_value(section, key, raw, _field_kind(section, key, known[key]))
        section_values[section] = values

    cfg = Config(**{name: cls(**section_values.get(name, {})) for name, cls in _SECTIONS.items()})
    if overrides:
        cfg = cfg.with_overrides(**overrides)
    _validate(cfg)
    return cfg


def serialize_config(cfg: Config) -> str:
    lines = []
    for section, cls in _SECTIONS.items():
        lines.append(f"[{section}]")
        block = getattr(cfg, section)
        for f in fields(cls):
            lines.append(f"{f.name} = {_render_value(section, f.name, getattr(block, f.name))}")
        lines.append("")
    return "\n".join(lines)


def _require(cond: bool, location: str, value, reason: str) -> None:
    if not cond:
        raise ValueOutOfRangeError(location, value, reason)


def _validate(cfg: Config) -> None:
    sc = cfg.scenario
    for name in ("d_user_m", "d_bs_m", "d_eve_m"):
        _require(getattr(sc, name) > 0, f"scenario.{name}", getattr(sc, name), "must be positive")
    _require(0 < sc.incident_angle_deg < 360, "scenario.incident_angle_deg", sc.incident_angle_deg, "must lie in (0, 360)")
    _require(sc.user_spread_deg >= 0, "scenario.user_spread_deg", sc.user_spread_deg, "must be nonnegative")
    _require(sc.bandwidth_hz > 0, "scenario.bandwidth_hz", sc.bandwidth_hz, "must be positive")
    _require(sc.carrier_freq_hz > 0, "scenario.carrier_freq_hz", sc.carrier_freq_hz, "must be positive")
    _require(sc.pathloss_exp_rics >= 2, "scenario.pathloss_exp_rics", sc.pathloss_exp_rics, "must be >= 2")
    _require(sc.pathloss_exp_direct >= 2, "scenario.pathloss_exp_direct", sc.pathloss_exp_direct, "must be >= 2")

    su = cfg.surface
    _require(su.n_elements >= 2, "surface.n_elements", su.n_elements, "must be at least 2")
    _require(su.mode in ("RA", "RR"), "surface.mode", su.mode, "must be RA or RR")
    _require(0.0 <= su.alpha <= 1.0, "surface.alpha", su.alpha, "must lie in [0, 1]")
    _require(len(su.alpha_grid) > 0, "surface.alpha_grid", su.alpha_grid, "must be non-empty")
    for a in su.alpha_grid:
        _require(0.0 <= a <= 1.0, "surface.alpha_grid", a, "entries must lie in [0, 1]")
    _require(len(su.element_grid) > 0, "surface.element_grid", su.element_grid, "must be non-empty")
    _require(su.n_absorb >= 1, "surface.n_absorb", su.n_absorb, "must be at least 1")
    for n in su.element_grid:
        _require(n > su.n_absorb, "surface.element_grid", n, f"entries must exceed n_absorb={su.n_absorb}")
    _require(su.n_elements > su.n_absorb, "surface.n_elements", su.n_elements, f"must exceed n_absorb={su.n_absorb}")

    onn = cfg.onn
    _require(onn.grid >= 4 and onn.grid % 4 == 0, "onn.grid", onn.grid, "must be a positive multiple of 4")
    _require(onn.layers >= 1, "onn.layers", onn.layers, "must be at least 1")
    _require(onn.epochs >= 1, "onn.epochs", onn.epochs, "must be at least 1")
    _require(onn.learning_rate >= 0, "onn.learning_rate", onn.learning_rate, "must be nonnegative")
    _require(onn.batch_size >= 1, "onn.batch_size", onn.batch_size, "must be at least 1")
    _require(onn.lr_decay_every >= 0, "onn.lr_decay_every", onn.lr_decay_every, "must be nonnegative")
    _require(0 < onn.lr_decay_factor <= 1, "onn.lr_decay_factor", onn.lr_decay_factor, "must lie in (0, 1]")
    _require(onn.train_per_class >= 1, "onn.train_per_class", onn.train_per_class, "must be at least 1")
    _require(onn.test_per_class >= 1, "onn.test_per_class", onn.test_per_class, "must be at least 1")
    _require(onn.n_samples >= 256, "onn.n_samples", onn.n_samples, "must be at least 256")

    ex = cfg.experiment
    _require(ex.frames >= 1, "experiment.frames", ex.frames, "must be at least 1")
    _require(ex.frame_slots >= 1, "experiment.frame_slots", ex.frame_slots, "must be at least 1")
    _require(ex.slot_duration_s > 0, "experiment.slot_duration_s", ex.slot_duration_s, "must be positive")
    _require(ex.payload_bits >= 1, "experiment.payload_bits", ex.payload_bits, "must be at least 1")
    _require(ex.fading_trials >= 1, "experiment.fading_trials", ex.fading_trials, "must be at least 1")
    _require(ex.workers >= 1, "experiment.workers", ex.workers, "must be at least 1")

    _require(0 <= cfg.run.seed < 2**64, "run.seed", cfg.run.seed, "must be an unsigned 64-bit integer")


def build_scenario(cfg: Config) -> Scenario:
    """Place the configured scenario (powers converted from dBm to watts)."""
    sc = cfg.scenario
    rf = RfConstants(
        tx_power_w=dbm_to_watts(sc.tx_power_dbm),
        bandwidth_hz=sc.bandwidth_hz,
        noise_density_dbm_hz=sc.noise_density_dbm_hz,
        carrier_freq_hz=sc.carrier_freq_hz,
        pathloss_exp_rics=sc.pathloss_exp_rics,
        pathloss_exp_direct=sc.pathloss_exp_direct,
        direct_user_bs=sc.direct_user_bs,
        fading=sc.fading,
    )
    return place_scenario(
        sc.d_user_m, sc.d_bs_m, sc.incident_angle_deg, sc.d_eve_m, rf, sc.user_spread_deg
    )
