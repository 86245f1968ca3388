"""Smooth reference trajectories with analytic first derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DomainError


@dataclass(frozen=True)
class ReferenceSpec:
    """``offset + amplitude * sin(omega * t + phase)``."""

    amplitude: float = math.pi / 18
    omega: float = 0.3 * math.pi
    phase: float = -math.pi / 2
    offset: float = 0.0

    def __post_init__(self):
        for v in (self.amplitude, self.omega, self.phase, self.offset):
            if not math.isfinite(v):
                raise DomainError("reference parameters must be finite")

    @classmethod
    def constant(cls, value: float = 0.0) -> "ReferenceSpec":
        return cls(amplitude=0.0, omega=0.0, phase=0.0, offset=value)


ELEVATION_REFERENCE = ReferenceSpec()


def reference_eval(t: float, spec: ReferenceSpec = ELEVATION_REFERENCE) -> tuple[float, float]:
    """``(x_r, dx_r/dt)`` at time ``t``."""
    if t < 0:
        raise DomainError(f"reference undefined for t < 0 (t={t})")
    arg = spec.omega * t + spec.phase
    return (spec.offset + spec.amplitude * math.sin(arg),
            spec.amplitude * spec.omega * math.cos(arg))
