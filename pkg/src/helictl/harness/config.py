"""Scenario configuration: dataclasses, YAML load/dump and validation.

A scenario file is a YAML mapping::

    schema_version: 1
    dt: 1.0e-4
    t_end: 20.0
    controller: proposed          # or baseline
    initial_state: {x1: -0.4189, x2: 0.0, x3: 0.0, x4: 0.0}
    plant: {J_alpha: 1.044, J_beta: 0.044, L_a: 0.66, L_h: 0.178, m: 1.15, g: 9.81,
            u_limit: null}
    elevation:
      gains: {k1: 1, k2: 2, m1: 0.5, m2: 0.5, n1: 1, n2: 1, h: 3/5}
      hftd: {a0: 5, a1: 0.5, b0: 2, b1: 0.5, r1: 0.5, r2: 0.5, eps: 0.01}
      trainer: {learning_rate: 0.005, p: 0.6, width_floor: 0.05}
      net: {neurons: 5, box: [[-0.5, 0.5], [-1.0, 1.0]], width: 1.0}
      reference: {amplitude: 0.1745, omega: 0.9425, phase: -1.5708, offset: 0.0}
      disturbance: {kind: sinusoid, amplitude: 1.0, omega: 2.0, phase: 0.0}
    pitch: null                   # or a channel block; missing keys copy elevation
    output: {csv: true, plot: true, diag: false, stride: 1}

Values are SI with angles in radians. Loading with ``degrees=True``
converts the initial state and the reference amplitude/offset from degrees.
"""

from __future__ import annotations

import copy
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from ..controller import ControllerGains
from ..errors import ConfigError, DomainError
from ..hftd import HftdConfig, max_stable_dt
from ..mathcore import OddFraction
from ..plant import (DisturbanceSpec, NoDisturbance, PlantParams, PlantState, Sinusoid,
                     disturbance_from_dict, disturbance_to_dict)
from ..rbfnn import RbfNet, TrainerConfig, init_net
from .reference import ReferenceSpec

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class NetInit:
    neurons: int = 5
    box: tuple = ((-0.5, 0.5), (-1.0, 1.0))
    width: float = 1.0

    def build(self) -> RbfNet:
        return init_net(self.neurons, self.box, self.width)


@dataclass(frozen=True)
class ChannelConfig:
    gains: ControllerGains = field(default_factory=ControllerGains)
    hftd: HftdConfig = field(default_factory=HftdConfig)
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    net: NetInit = field(default_factory=NetInit)
    reference: ReferenceSpec = field(default_factory=ReferenceSpec)
    disturbance: DisturbanceSpec = field(default_factory=NoDisturbance)


@dataclass(frozen=True)
class OutputOptions:
    csv: bool = True
    plot: bool = True
    diag: bool = False
    stride: int = 1


@dataclass(frozen=True)
class ScenarioConfig:
    dt: float = 1e-4
    t_end: float = 20.0
    controller: str = "proposed"
    initial_state: PlantState = PlantState()
    plant: PlantParams = field(default_factory=PlantParams)
    u_limit: float | None = None
    elevation: ChannelConfig = field(default_factory=ChannelConfig)
    pitch: ChannelConfig | None = None
    output: OutputOptions = field(default_factory=OutputOptions)
    c_stab: float = 1.0
    envelope: float = math.pi
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        validate(self)

    def channels(self) -> dict[str, ChannelConfig]:
        out = {"elevation": self.elevation}
        if self.pitch is not None:
            out["pitch"] = self.pitch
        return out

    def with_variant(self, variant: str) -> "ScenarioConfig":
        return replace(self, controller=variant)


def validate(cfg: ScenarioConfig) -> None:
    if cfg.schema_version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {cfg.schema_version}")
    if not (cfg.dt > 0 and math.isfinite(cfg.dt)):
        raise ConfigError(f"dt must be > 0, got {cfg.dt}")
    if not cfg.t_end > cfg.dt:
        raise ConfigError(f"t_end ({cfg.t_end}) must exceed dt ({cfg.dt})")
    if cfg.controller not in ("proposed", "baseline"):
        raise ConfigError(f"controller must be proposed or baseline, got {cfg.controller!r}")
    if not cfg.c_stab > 0:
        raise ConfigError("c_stab must be > 0")
    if cfg.u_limit is not None and not cfg.u_limit > 0:
        raise ConfigError("u_limit must be > 0 when set")
    if cfg.output.stride < 1:
        raise ConfigError("output.stride must be >= 1")
    for name, ch in cfg.channels().items():
        limit = max_stable_dt(ch.hftd, cfg.c_stab)
        if cfg.dt > limit * (1 + 1e-9):
            raise ConfigError(
                f"dt={cfg.dt} exceeds the {name} differentiator limit eps^2*c_stab={limit:.3g}")


def nominal_config(**overrides) -> ScenarioConfig:
    """Reference experiment: -24 deg start, d1 = sin(2t), sinusoidal target."""
    base = ScenarioConfig(
        initial_state=PlantState(math.radians(-24.0), 0.0, 0.0, 0.0),
        elevation=ChannelConfig(disturbance=Sinusoid(1.0, 2.0, 0.0)),
    )
    return replace(base, **overrides)


# -- dict / YAML conversion -------------------------------------------------

def _build(cls, data: dict | None, where: str, **extra):
    data = dict(data or {})
    names = {f.name for f in fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    try:
        return cls(**data, **extra)
    except (DomainError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _channel_from_dict(d: dict, where: str, fallback: dict | None = None) -> ChannelConfig:
    merged = copy.deepcopy(fallback or {})
    merged.update(d or {})
    unknown = set(merged) - {"gains", "hftd", "trainer", "net", "reference", "disturbance"}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    gains = dict(merged.get("gains") or {})
    if "h" in gains:
        try:
            gains["h"] = OddFraction.parse(gains["h"])
        except (DomainError, ValueError) as exc:
            raise ConfigError(f"{where}.gains.h: {exc}") from None
    net = dict(merged.get("net") or {})
    if "box" in net:
        net["box"] = tuple(tuple(float(v) for v in pair) for pair in net["box"])
    if "reference" in merged and merged["reference"] is not None:
        reference = _build(ReferenceSpec, merged["reference"], f"{where}.reference")
    elif where == "elevation":
        reference = ReferenceSpec()
    else:
        reference = ReferenceSpec.constant(0.0)
    try:
        disturbance = disturbance_from_dict(merged.get("disturbance"))
    except DomainError as exc:
        raise ConfigError(f"{where}.disturbance: {exc}") from None
    return ChannelConfig(
        gains=_build(ControllerGains, gains, f"{where}.gains"),
        hftd=_build(HftdConfig, merged.get("hftd"), f"{where}.hftd"),
        trainer=_build(TrainerConfig, merged.get("trainer"), f"{where}.trainer"),
        net=_build(NetInit, net, f"{where}.net"),
        reference=reference,
        disturbance=disturbance,
    )


def config_from_dict(d: dict[str, Any], degrees: bool = False) -> ScenarioConfig:
    if not isinstance(d, dict):
        raise ConfigError("scenario document must be a mapping")
    d = copy.deepcopy(d)
    known = {f.name for f in fields(ScenarioConfig)} | {"initial_state"}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {version}")

    init = d.get("initial_state") or {}
    if isinstance(init, (list, tuple)):
        init = dict(zip(PlantState._fields, init))
    unknown = set(init) - set(PlantState._fields)
    if unknown:
        raise ConfigError(f"initial_state: unknown keys {sorted(unknown)}")
    conv = math.radians if degrees else float
    state = PlantState(*(conv(float(init.get(k, 0.0))) for k in PlantState._fields))

    plant = dict(d.get("plant") or {})
    u_limit = plant.pop("u_limit", d.get("u_limit"))
    elev_raw = d.get("elevation") or {}
    if degrees:
        elev_raw = _reference_to_rad(elev_raw)
    elevation = _channel_from_dict(elev_raw, "elevation")
    pitch = None
    if d.get("pitch") is not None:
        pitch_raw = d["pitch"]
        if degrees:
            pitch_raw = _reference_to_rad(pitch_raw)
        # pitch inherits the elevation tuning but never its reference/disturbance
        fallback = {k: v for k, v in elev_raw.items() if k in ("gains", "hftd", "trainer", "net")}
        pitch = _channel_from_dict(pitch_raw, "pitch", fallback)

    out = _build(OutputOptions, d.get("output"), "output")
    try:
        return ScenarioConfig(
            dt=float(d.get("dt", 1e-4)),
            t_end=float(d.get("t_end", 20.0)),
            controller=str(d.get("controller", "proposed")),
            initial_state=state,
            plant=_build(PlantParams, plant, "plant"),
            u_limit=None if u_limit is None else float(u_limit),
            elevation=elevation,
            pitch=pitch,
            output=out,
            c_stab=float(d.get("c_stab", 1.0)),
            envelope=float(d.get("envelope", math.pi)),
            schema_version=version,
        )
    except (DomainError, TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from None


def _reference_to_rad(ch: dict) -> dict:
    ch = copy.deepcopy(ch)
    ref = ch.get("reference")
    if ref:
        for key in ("amplitude", "offset"):
            if key in ref:
                ref[key] = math.radians(float(ref[key]))
    return ch


def _channel_to_dict(ch: ChannelConfig) -> dict:
    gains = asdict(ch.gains)
    gains["h"] = str(ch.gains.h)
    net = {"neurons": ch.net.neurons, "box": [list(p) for p in ch.net.box],
           "width": ch.net.width}
    return {
        "gains": gains,
        "hftd": asdict(ch.hftd),
        "trainer": asdict(ch.trainer),
        "net": net,
        "reference": asdict(ch.reference),
        "disturbance": disturbance_to_dict(ch.disturbance),
    }


def config_to_dict(cfg: ScenarioConfig) -> dict[str, Any]:
    plant = asdict(cfg.plant)
    plant["u_limit"] = cfg.u_limit
    return {
        "schema_version": cfg.schema_version,
        "dt": cfg.dt,
        "t_end": cfg.t_end,
        "controller": cfg.controller,
        "c_stab": cfg.c_stab,
        "envelope": cfg.envelope,
        "initial_state": dict(cfg.initial_state._asdict()),
        "plant": plant,
        "elevation": _channel_to_dict(cfg.elevation),
        "pitch": None if cfg.pitch is None else _channel_to_dict(cfg.pitch),
        "output": asdict(cfg.output),
    }


def load_config(path, degrees: bool = False) -> ScenarioConfig:
    text = Path(path).read_text()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return config_from_dict(doc, degrees=degrees)


def dump_config(cfg: ScenarioConfig, path=None) -> str:
    text = yaml.safe_dump(config_to_dict(cfg), sort_keys=False)
    if path is not None:
        Path(path).write_text(text)
    return text
