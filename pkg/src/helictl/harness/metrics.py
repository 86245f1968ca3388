"""Scalar performance figures extracted from a closed-loop log."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from .simulate import TimeSeries


@dataclass(frozen=True)
class Metrics:
    rmse: float  # rad, over the window
    settling_time: float  # s; math.inf when the run never settles
    max_error_after_settling: float  # rad
    final_V: float
    peak_u: float
    band: float  # rad, the settling band used

    @property
    def settled(self) -> bool:
        return math.isfinite(self.settling_time)

    def as_dict(self) -> dict[str, float]:
        return {
            "rmse_rad": self.rmse,
            "rmse_deg": math.degrees(self.rmse),
            "settling_time_s": self.settling_time,
            "max_error_after_settling_deg": math.degrees(self.max_error_after_settling),
            "final_V": self.final_V,
            "peak_u": self.peak_u,
        }


def settling_time(t: np.ndarray, err: np.ndarray, band: float) -> float:
    """Earliest sample time after which ``|err| <= band`` for the rest of the log."""
    outside = np.flatnonzero(np.abs(err) > band)
    if outside.size == 0:
        return float(t[0]) if t.size else 0.0
    last = outside[-1]
    if last == t.size - 1:
        return math.inf
    return float(t[last + 1])


def compute_metrics(series: TimeSeries, window: tuple[float, float] = (10.0, 20.0),
                    band: float | None = None, band_fraction: float = 0.02) -> Metrics:
    """Tracking metrics of the elevation channel.

    The settling band defaults to ``band_fraction`` of the reference
    amplitude, taken as ``max |x1r|`` over the log.
    """
    t = series.t
    if len(series) == 0:
        raise DomainError("empty series")
    t_a, t_b = window
    mask = series.window(t_a, t_b)
    if not mask.any():
        raise DomainError(f"window [{t_a}, {t_b}] contains no samples")
    e1 = series["e1"]
    rmse = float(np.sqrt(np.mean(e1[mask] ** 2)))
    if band is None:
        band = band_fraction * float(np.max(np.abs(series["x1r"])))
    ts = settling_time(t, e1, band)
    after = t >= ts
    max_after = float(np.max(np.abs(e1[after]))) if after.any() else math.nan
    return Metrics(rmse=rmse, settling_time=ts, max_error_after_settling=max_after,
                   final_V=float(series["V"][-1]), peak_u=float(np.max(np.abs(series["u1"]))),
                   band=band)
