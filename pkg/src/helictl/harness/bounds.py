"""Residual-set radius of the finite-time stability argument, computed
from the controller gains and an estimate of the lumped residual term."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..controller import ControllerGains
from ..errors import DomainError
from .simulate import TimeSeries


@dataclass(frozen=True)
class FiniteTimeBound:
    eta1: float
    eta2: float
    eta3: float
    kappa: float
    h: float
    z_radius: float  # bound on each |z_i| and |xi_i|
    e1_radius: float  # bound on |e1| = twice z_radius
    valid: bool

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in
                ("eta1", "eta2", "eta3", "kappa", "h", "z_radius", "e1_radius", "valid")}


def finite_time_bounds(gains: ControllerGains, eta3: float, kappa: float) -> FiniteTimeBound:
    """Decay coefficients and the ultimate tracking-error radius.

    ``eta1 = min(2k1 - 1, 2k2 - 1)``; ``eta2`` is the smallest of
    ``(m_i - n_i/(1+h)) 2^((1+h)/2)`` and ``n_i/(1+h) 2^((1+h)/2)``. The
    radius is only meaningful when both are positive; otherwise ``valid`` is
    False and the radii are infinite.
    """
    if not 0.0 < kappa < 1.0:
        raise DomainError(f"kappa must lie in (0, 1), got {kappa}")
    if not eta3 > 0:
        raise DomainError(f"eta3 estimate must be > 0, got {eta3}")
    h = gains.h.value
    c = 2.0 ** ((1 + h) / 2)
    eta1 = min(2 * gains.k1 - 1, 2 * gains.k2 - 1)
    eta2 = min((gains.m1 - gains.n1 / (1 + h)) * c, (gains.m2 - gains.n2 / (1 + h)) * c,
               gains.n1 / (1 + h) * c, gains.n2 / (1 + h) * c)
    valid = eta1 > 0 and eta2 > 0
    if valid:
        r1 = math.sqrt(2 * eta3 / ((1 - kappa) * eta1))
        r2 = math.sqrt(2 * (eta3 / ((1 - kappa) * eta2)) ** (2 / (1 + h)))
        z_radius = min(r1, r2)
    else:
        z_radius = math.inf
    return FiniteTimeBound(eta1, eta2, eta3, kappa, h, z_radius, 2 * z_radius, valid)


def eta3_proxy(series: TimeSeries, t_from: float) -> float:
    """Empirical stand-in for the lumped residual after ``t_from``:
    ``0.5 max (x1c - alpha)^2 + 0.5 max E^2``."""
    mask = series.t >= t_from
    if not mask.any():
        raise DomainError(f"no samples after t = {t_from}")
    fe = series["filter_err"][mask]
    E = series["E"][mask]
    return float(0.5 * np.max(fe ** 2) + 0.5 * np.max(E ** 2))


def bound_consistency_report(series: TimeSeries, gains: ControllerGains,
                             kappa: float = 0.5, t_from: float = 5.0) -> dict:
    """Compare the observed post-``t_from`` tracking error with the radius
    obtained from the logged residual proxy. Diagnostic only."""
    eta3 = max(eta3_proxy(series, t_from), np.finfo(float).tiny)
    b = finite_time_bounds(gains, eta3, kappa)
    mask = series.t >= t_from
    observed = float(np.max(np.abs(series["e1"][mask])))
    return {
        **b.as_dict(),
        "t_from": t_from,
        "observed_max_abs_e1": observed,
        "within_radius": bool(b.valid and observed <= b.e1_radius),
    }
