"""Elevation/pitch dynamics of the bench helicopter and the compound
disturbance signals injected into it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import DomainError, NumericalOverflowError


@dataclass(frozen=True)
class PlantParams:
    """Physical constants. Defaults are representative bench values."""

    J_alpha: float = 1.044  # elevation inertia, kg m^2
    J_beta: float = 0.044  # pitch inertia, kg m^2
    L_a: float = 0.660  # elevation arm, m
    L_h: float = 0.178  # pitch arm, m
    m: float = 1.15  # effective mass, kg
    g: float = 9.81

    def __post_init__(self):
        for name in ("J_alpha", "J_beta", "L_a", "L_h", "m", "g"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"PlantParams.{name} must be finite and > 0, got {v}")


class PlantState(NamedTuple):
    x1: float = 0.0  # elevation, rad
    x2: float = 0.0  # elevation rate, rad/s
    x3: float = 0.0  # pitch, rad
    x4: float = 0.0  # pitch rate, rad/s

    def check(self, envelope: float = math.pi):
        if not all(math.isfinite(v) for v in self):
            raise NumericalOverflowError("plant state not finite", component="state")
        if abs(self.x1) >= envelope or abs(self.x3) >= envelope:
            raise NumericalOverflowError(
                f"attitude left the +/-{envelope:.4g} rad envelope", component="state")
        return self


@dataclass(frozen=True)
class ControlInput:
    u1: float = 0.0
    u2: float = 0.0
    limit: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.u1) and math.isfinite(self.u2)):
            raise DomainError("control input must be finite")
        if self.limit is not None:
            if not self.limit > 0:
                raise DomainError(f"saturation limit must be > 0, got {self.limit}")
            if abs(self.u1) > self.limit or abs(self.u2) > self.limit:
                raise DomainError("control input exceeds its saturation limit")

    @classmethod
    def saturated(cls, u1: float, u2: float, limit: float | None = None) -> "ControlInput":
        if limit is not None:
            u1 = min(max(u1, -limit), limit)
            u2 = min(max(u2, -limit), limit)
        return cls(u1, u2, limit)


# -- disturbances -----------------------------------------------------------

@dataclass(frozen=True)
class NoDisturbance:
    kind = "none"


@dataclass(frozen=True)
class Sinusoid:
    amplitude: float = 1.0
    omega: float = 2.0  # rad/s
    phase: float = 0.0  # rad
    kind = "sinusoid"

    def __post_init__(self):
        for v in (self.amplitude, self.omega, self.phase):
            if not math.isfinite(v):
                raise DomainError("sinusoid parameters must be finite")


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear signal through ``(times[i], values[i])``; held
    constant after the last sample."""

    times: tuple
    values: tuple
    kind = "tabulated"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size == 0:
            raise DomainError("tabulated disturbance needs equal-length 1-D times/values")
        if np.any(np.diff(t) <= 0):
            raise DomainError("tabulated disturbance times must be strictly increasing")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise DomainError("tabulated disturbance entries must be finite")
        object.__setattr__(self, "times", tuple(float(x) for x in t))
        object.__setattr__(self, "values", tuple(float(x) for x in v))


DisturbanceSpec = Union[NoDisturbance, Sinusoid, Tabulated]


def disturbance_eval(spec: DisturbanceSpec, t: float) -> float:
    if isinstance(spec, NoDisturbance):
        return 0.0
    if isinstance(spec, Sinusoid):
        return spec.amplitude * math.sin(spec.omega * t + spec.phase)
    if isinstance(spec, Tabulated):
        if t < spec.times[0]:
            raise DomainError(f"t={t} precedes the first table sample {spec.times[0]}")
        return float(np.interp(t, spec.times, spec.values))
    raise DomainError(f"unknown disturbance spec {spec!r}")


def disturbance_from_dict(d: dict | None) -> DisturbanceSpec:
    if d is None:
        return NoDisturbance()
    d = dict(d)
    kind = d.pop("kind", "none")
    try:
        if kind == "none":
            return NoDisturbance()
        if kind == "sinusoid":
            return Sinusoid(**{k: float(v) for k, v in d.items()})
        if kind == "tabulated":
            return Tabulated(tuple(d["times"]), tuple(d["values"]))
    except TypeError as exc:
        raise DomainError(f"bad {kind} disturbance: {exc}") from None
    raise DomainError(f"unknown disturbance kind {kind!r}")


def disturbance_to_dict(spec: DisturbanceSpec) -> dict:
    if isinstance(spec, Sinusoid):
        return {"kind": "sinusoid", "amplitude": spec.amplitude,
                "omega": spec.omega, "phase": spec.phase}
    if isinstance(spec, Tabulated):
        return {"kind": "tabulated", "times": list(spec.times), "values": list(spec.values)}
    return {"kind": "none"}


# -- dynamics ---------------------------------------------------------------

def elevation_accel(x1: float, u1: float, d1: float, p: PlantParams) -> float:
    return p.L_a / p.J_alpha * u1 - p.g / p.J_alpha * p.m * p.L_a * math.cos(x1) + d1


def pitch_accel(u2: float, d2: float, p: PlantParams) -> float:
    return p.L_h / p.J_beta * u2 + d2


def plant_derivatives(s: Sequence[float], u: ControlInput, d1: float, d2: float,
                      p: PlantParams) -> PlantState:
    """Time derivative of ``(x1, x2, x3, x4)`` under input ``u`` and
    disturbances ``d1`` (elevation) and ``d2`` (pitch)."""
    x1, x2, x3, x4 = s
    out = PlantState(x2, elevation_accel(x1, u.u1, d1, p), x4, pitch_accel(u.u2, d2, p))
    for name, v in zip(PlantState._fields, out):
        if not math.isfinite(v):
            raise NumericalOverflowError("plant derivative not finite",
                                         component="d" + name, stage="plant")
    return out
