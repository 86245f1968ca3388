"""Closed-loop simulation: plant, compensators and differentiators are
integrated as one augmented state with the control held over each step."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..controller import ChannelController, channel_rates, channel_sample, make_channel, train
from ..errors import NumericalOverflowError
from ..plant import ControlInput, PlantState, disturbance_eval, elevation_accel, pitch_accel
from .config import ScenarioConfig
from .integrate import rk4_step
from .reference import ReferenceSpec, reference_eval

log = logging.getLogger(__name__)

BASE_COLUMNS = ("t", "x1", "x2", "x3", "x4", "x1r", "dx1r", "e1", "e2", "z1", "z2",
                "xi1", "xi2", "u1", "E", "nn_out", "V")
DIAG_COLUMNS = ("alpha", "x1c", "x2c", "dz2c", "filter_err",
                "x3r", "dx3r", "pitch_e1", "pitch_e2", "pitch_z1", "pitch_z2",
                "pitch_xi1", "pitch_xi2", "u2", "pitch_E", "pitch_nn_out", "pitch_V")


def net_columns(n_neurons: int, n_inputs: int = 2) -> tuple[str, ...]:
    cols = [f"w{i + 1}" for i in range(n_neurons)]
    cols += [f"mu{i + 1}_{j + 1}" for i in range(n_neurons) for j in range(n_inputs)]
    cols += [f"delta{i + 1}" for i in range(n_neurons)]
    return tuple(cols)


@dataclass
class TimeSeries:
    """Uniformly sampled closed-loop log; one row per control sample.

    ``data[:, i]`` holds column ``columns[i]``. ``error`` is set when the run
    stopped early, in which case the rows cover the completed part only.
    """

    columns: tuple[str, ...]
    data: np.ndarray
    dt: float
    error: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.columns))
        self._index = {c: i for i, c in enumerate(self.columns)}

    def __getitem__(self, name: str) -> np.ndarray:
        return self.data[:, self._index[name]]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def t(self) -> np.ndarray:
        return self["t"]

    def select(self, columns) -> "TimeSeries":
        idx = [self._index[c] for c in columns]
        return TimeSeries(tuple(columns), self.data[:, idx], self.dt, self.error, dict(self.meta))

    def window(self, t_a: float, t_b: float) -> np.ndarray:
        t = self.t
        return (t >= t_a - 1e-12) & (t <= t_b + 1e-12)


def build_controllers(cfg: ScenarioConfig) -> dict[str, ChannelController]:
    ctrls = {}
    s0 = cfg.initial_state
    for name, ch in cfg.channels().items():
        ctrls[name] = make_channel(
            s0, reference_eval(0.0, ch.reference), channel=name, variant=cfg.controller,
            gains=ch.gains, hftd_cfg=ch.hftd, trainer=ch.trainer, net=ch.net.build(),
            params=cfg.plant)
    return ctrls


def run_scenario(cfg: ScenarioConfig, progress: bool = False) -> TimeSeries:
    """Simulate ``cfg`` from ``t = 0`` to ``t_end``.

    Each sample computes the control from the current augmented state, runs
    one trainer iteration per channel, then takes one RK4 step with the
    control and network held. Numerical failure ends the run early and the
    partial log is returned with ``error`` set.
    """
    dt = cfg.dt
    n = int(round(cfg.t_end / dt))
    ctrls = build_controllers(cfg)
    elev = ctrls["elevation"]
    pitch = ctrls.get("pitch")
    elev_ref: ReferenceSpec = cfg.elevation.reference
    pitch_ref = cfg.pitch.reference if cfg.pitch is not None else None
    elev_dist = cfg.elevation.disturbance
    pitch_dist = cfg.pitch.disturbance if cfg.pitch is not None else None
    params = cfg.plant

    ncols_net = 4 * elev.net.n_neurons
    columns = BASE_COLUMNS + DIAG_COLUMNS + net_columns(elev.net.n_neurons)
    nb, nd = len(BASE_COLUMNS), len(DIAG_COLUMNS)
    data = np.zeros((n + 1, len(columns)))

    y = np.array([*cfg.initial_state, *elev.internal,
                  *(pitch.internal if pitch is not None else ())], dtype=float)
    n_aug = y.size
    error = None
    u1 = u2 = 0.0

    def rates(t, v):
        v = v.tolist()
        x1, x2, x3, x4 = v[:4]
        d1 = disturbance_eval(elev_dist, t)
        out = [x2, elevation_accel(x1, u1, d1, params), x4, 0.0]
        out += channel_rates(elev, v[4:10], x1, x2, reference_eval(t, elev_ref))
        if pitch is not None:
            d2 = disturbance_eval(pitch_dist, t)
            out[3] = pitch_accel(u2, d2, params)
            out += channel_rates(pitch, v[10:16], x3, x4, reference_eval(t, pitch_ref))
        return out

    last = 0
    for k in range(n + 1):
        t = k * dt
        s = y[:4].tolist()
        try:
            PlantState(*s).check(cfg.envelope)
            ref_e = reference_eval(t, elev_ref)
            de = channel_sample(elev, s, ref_e)
            if pitch is not None:
                ref_p = reference_eval(t, pitch_ref)
                dp = channel_sample(pitch, s, ref_p)
                u_pitch = dp.u
            else:
                ref_p, dp, u_pitch = (0.0, 0.0), None, 0.0
            u = ControlInput.saturated(de.u, u_pitch, cfg.u_limit)
        except NumericalOverflowError as exc:
            exc.step = k
            error = str(exc)
            break

        row = data[k]
        row[:nb] = (t, *s, *ref_e, de.e1, de.e2, de.z1, de.z2, de.xi1, de.xi2, u.u1,
                    de.E, de.nn_out, de.V)
        pd = (dp.e1, dp.e2, dp.z1, dp.z2, dp.xi1, dp.xi2, u.u2, dp.E, dp.nn_out, dp.V) \
            if dp is not None else (0.0,) * 10
        row[nb:nb + nd] = (de.alpha, de.x1c, de.x2c, de.dz2c, de.x1c - de.alpha, *ref_p, *pd)
        net = elev.net
        m = net.n_neurons
        off = nb + nd
        row[off:off + m] = net.weights
        row[off + m:off + 3 * m] = net.centers.reshape(-1)
        row[off + 3 * m:off + ncols_net] = net.widths
        last = k
        if k == n:
            break

        try:
            elev = train(elev, s, de.E)
            if pitch is not None:
                pitch = train(pitch, s, dp.E)
            u1, u2 = u.u1, u.u2
            y = rk4_step(rates, y, t, dt)
        except NumericalOverflowError as exc:
            exc.step = k
            error = str(exc)
            break
        elev = elev.with_internal(y[4:10].tolist())
        if pitch is not None:
            pitch = pitch.with_internal(y[10:16].tolist())
        if progress and k % max(1, n // 20) == 0:
            log.info("t = %.3f s, e1 = %.3e rad", t, de.e1)

    if error is not None:
        log.warning("run stopped early: %s", error)
        data = data[:last + 1] if last or error is None else data[:0]
        if last == 0 and data.shape[0] == 0:
            data = np.zeros((0, len(columns)))
    meta = {"controller": cfg.controller, "n_aug": n_aug, "n_steps": n}
    return TimeSeries(columns, data, dt, error, meta)
