"""Fixed-step classical Runge-Kutta integration."""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..errors import DomainError, NumericalOverflowError


def rk4_step(f: Callable[[float, np.ndarray], np.ndarray], y, t: float, dt: float) -> np.ndarray:
    """Advance ``y' = f(t, y)`` by one classical RK4 step of size ``dt``.

    Any non-finite stage derivative raises ``NumericalOverflowError`` tagged
    with the stage (``k1`` .. ``k4``).
    """
    if not dt > 0:
        raise DomainError(f"dt must be > 0, got {dt}")
    y = np.asarray(y, dtype=float)
    h2 = 0.5 * dt

    def stage(name, tt, yy):
        k = np.asarray(f(tt, yy), dtype=float)
        if not np.isfinite(k).all():
            raise NumericalOverflowError("non-finite derivative", stage=name)
        return k

    k1 = stage("k1", t, y)
    k2 = stage("k2", t + h2, y + h2 * k1)
    k3 = stage("k3", t + h2, y + h2 * k2)
    k4 = stage("k4", t + dt, y + dt * k3)
    return y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(f, y0, t0: float, t_end: float, dt: float) -> np.ndarray:
    """Final state after ``round((t_end - t0) / dt)`` RK4 steps."""
    n = int(round((t_end - t0) / dt))
    y = np.asarray(y0, dtype=float)
    for k in range(n):
        y = rk4_step(f, y, t0 + k * dt, dt)
    return y
