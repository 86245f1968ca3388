"""Hybrid finite-time differentiator: a singularly perturbed second-order
filter returning a smoothed copy of its input and a derivative estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import DomainError, NumericalOverflowError
from .mathcore import _sig


@dataclass(frozen=True)
class HftdConfig:
    a0: float = 5.0
    a1: float = 0.5
    b0: float = 2.0
    b1: float = 0.5
    r1: float = 0.5
    r2: float = 0.5
    eps: float = 0.01

    def __post_init__(self):
        for name in ("a0", "a1", "b0", "b1"):
            if not getattr(self, name) > 0:
                raise DomainError(f"HFTD gain {name} must be > 0")
        for name in ("r1", "r2", "eps"):
            if not 0.0 < getattr(self, name) < 1.0:
                raise DomainError(f"HFTD parameter {name} must lie in (0, 1)")


class HftdState(NamedTuple):
    x1c: float = 0.0  # tracked signal
    x2c: float = 0.0  # derivative estimate


def hftd_rates(x1c: float, x2c: float, target: float, cfg: HftdConfig) -> tuple[float, float]:
    """Float-level right-hand side; no finiteness checks."""
    e = x1c - target
    ex = cfg.eps * x2c
    acc = (-cfg.a0 * e - cfg.a1 * _sig(e, cfg.r1)
           - cfg.b0 * ex - cfg.b1 * _sig(ex, cfg.r2)) / (cfg.eps * cfg.eps)
    return x2c, acc


def hftd_derivatives(s: HftdState, target: float, cfg: HftdConfig) -> HftdState:
    """Time derivative of the differentiator state when tracking ``target``."""
    d = HftdState(*hftd_rates(s.x1c, s.x2c, target, cfg))
    if not (math.isfinite(d.x1c) and math.isfinite(d.x2c)):
        raise NumericalOverflowError("HFTD derivative not finite", component="x2c",
                                     stage="hftd")
    return d


def hftd_outputs(s: HftdState) -> tuple[float, float]:
    """``(filtered signal, derivative estimate)``."""
    return s.x1c, s.x2c


def max_stable_dt(cfg: HftdConfig, c_stab: float = 1.0) -> float:
    """Largest step the harness accepts for an explicit integration."""
    return c_stab * cfg.eps ** 2


def track_signal(signal: Callable[[float], float], cfg: HftdConfig, dt: float,
                 t_end: float, s0: HftdState | None = None):
    """Run the differentiator alone on ``signal(t)`` with fixed-step RK4.

    Returns ``(t, x1c, x2c)`` as numpy arrays sampled every step.
    """
    if dt <= 0 or t_end <= dt:
        raise DomainError("need 0 < dt < t_end")
    n = int(round(t_end / dt))
    ts = np.arange(n + 1) * dt
    out1 = np.empty(n + 1)
    out2 = np.empty(n + 1)
    x1, x2 = s0 if s0 is not None else (signal(0.0), 0.0)
    h2 = 0.5 * dt
    for k in range(n + 1):
        out1[k] = x1
        out2[k] = x2
        if k == n:
            break
        t = ts[k]
        k1 = hftd_rates(x1, x2, signal(t), cfg)
        tm = t + h2
        sm = signal(tm)
        k2 = hftd_rates(x1 + h2 * k1[0], x2 + h2 * k1[1], sm, cfg)
        k3 = hftd_rates(x1 + h2 * k2[0], x2 + h2 * k2[1], sm, cfg)
        k4 = hftd_rates(x1 + dt * k3[0], x2 + dt * k3[1], signal(t + dt), cfg)
        x1 += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        x2 += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        if not (math.isfinite(x1) and math.isfinite(x2)):
            raise NumericalOverflowError("HFTD state diverged", component="hftd",
                                         stage="track_signal", step=k)
    return ts, out1, out2
