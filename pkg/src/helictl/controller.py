"""Finite-time backstepping channel controller with error compensation,
HFTD-filtered virtual control and an online-trained RBF disturbance
estimator, plus the conventional adaptive-NN backstepping baseline."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

from .errors import DomainError, NumericalOverflowError
from .hftd import HftdConfig, HftdState, hftd_rates
from .mathcore import OddFraction, _sig, odd_pow
from .plant import PlantParams
from .rbfnn import RbfNet, TrainerConfig, evaluate, ftgd_step, gd_step, init_net

CHANNELS = ("elevation", "pitch")
VARIANTS = ("proposed", "baseline")


@dataclass(frozen=True)
class ControllerGains:
    k1: float = 1.0
    k2: float = 2.0
    m1: float = 0.5
    m2: float = 0.5
    n1: float = 1.0
    n2: float = 1.0
    h: OddFraction = OddFraction(3, 5)

    def __post_init__(self):
        object.__setattr__(self, "h", OddFraction.parse(self.h))
        if not (self.k1 > 0 and self.k2 > 0):
            raise DomainError("k1, k2 must be > 0")
        # zero m/n is allowed: it is the degenerate (non finite-time) law
        for name in ("m1", "m2", "n1", "n2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be finite and >= 0, got {v}")

    @property
    def eta2_warning(self) -> bool:
        """True when some ``m_i <= n_i / (1 + h)``, i.e. the finite-time
        decay coefficient of the Lyapunov bound is not positive."""
        hv = self.h.value
        return self.m1 <= self.n1 / (1 + hv) or self.m2 <= self.n2 / (1 + hv)


class CompensatorState(NamedTuple):
    xi1: float = 0.0
    xi2: float = 0.0


class Diagnostics(NamedTuple):
    u: float
    e1: float
    e2: float
    z1: float
    z2: float
    xi1: float
    xi2: float
    E: float
    nn_out: float
    V: float
    alpha: float
    x1c: float
    x2c: float
    dz2c: float


@dataclass(frozen=True)
class ChannelController:
    channel: str = "elevation"
    variant: str = "proposed"
    gains: ControllerGains = field(default_factory=ControllerGains)
    hftd_cfg: HftdConfig = field(default_factory=HftdConfig)
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    net: RbfNet = field(default_factory=init_net)
    params: PlantParams = field(default_factory=PlantParams)
    comp: CompensatorState = CompensatorState()
    hftd_alpha: HftdState = HftdState()
    hftd_z: HftdState = HftdState()

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise DomainError(f"unknown channel {self.channel!r}")
        if self.variant not in VARIANTS:
            raise DomainError(f"unknown controller variant {self.variant!r}")
        if self.net.n_inputs != 2:
            raise DomainError("channel networks take the (angle, rate) pair as input")

    @property
    def internal(self) -> tuple[float, ...]:
        """Continuous internal states ``(xi1, xi2, x1c, x2c, zc1, zc2)``."""
        return (*self.comp, *self.hftd_alpha, *self.hftd_z)

    def with_internal(self, y: Sequence[float]) -> "ChannelController":
        return self._evolve(comp=CompensatorState(y[0], y[1]),
                            hftd_alpha=HftdState(y[2], y[3]), hftd_z=HftdState(y[4], y[5]))

    def with_net(self, net: RbfNet) -> "ChannelController":
        return self._evolve(net=net)

    def _evolve(self, **changes) -> "ChannelController":
        # cheap copy for per-step updates of already validated fields
        new = object.__new__(type(self))
        new.__dict__.update(self.__dict__)
        new.__dict__.update(changes)
        return new


def channel_pair(s: Sequence[float], channel: str) -> tuple[float, float]:
    """``(angle, rate)`` of ``channel`` from a full plant state."""
    return (s[0], s[1]) if channel == "elevation" else (s[2], s[3])


# -- proposed finite-time law ----------------------------------------------

def tracking_errors(s: Sequence[float], x1c: float, ref: tuple[float, float],
                    channel: str = "elevation") -> tuple[float, float]:
    angle, rate = channel_pair(s, channel)
    return angle - ref[0], rate - x1c


def compensation_derivatives(c: CompensatorState, filter_err: float,
                             gains: ControllerGains) -> tuple[float, float]:
    """Rates of the compensation signals; ``filter_err = x1c - alpha``."""
    xi1, xi2 = c
    h = gains.h
    d1 = -gains.k1 * xi1 + xi2 + filter_err - gains.n1 * odd_pow(xi1, h)
    d2 = -gains.k2 * xi2 - xi1 - gains.n2 * odd_pow(xi2, h)
    return d1, d2


def compensated_errors(e1: float, e2: float, c: CompensatorState) -> tuple[float, float]:
    return e1 - c[0], e2 - c[1]


def intermediate_control(e1: float, dxr: float, z1: float, gains: ControllerGains) -> float:
    return -gains.k1 * e1 + dxr - gains.m1 * odd_pow(z1, gains.h)


def control_law_elevation(e1: float, e2: float, z2: float, x2c: float, x1: float,
                          nn_out: float, gains: ControllerGains, params: PlantParams) -> float:
    p = params
    return p.J_alpha / p.L_a * (
        -gains.k2 * e2 - e1 + x2c + p.g / p.J_alpha * p.m * p.L_a * math.cos(x1)
        - gains.m2 * odd_pow(z2, gains.h) - nn_out)


def control_law_pitch(e1: float, e2: float, z2: float, x2c: float, nn_out: float,
                      gains: ControllerGains, params: PlantParams) -> float:
    # pitch row of the plant has no gravity term
    return params.J_beta / params.L_h * (
        -gains.k2 * e2 - e1 + x2c - gains.m2 * odd_pow(z2, gains.h) - nn_out)


def proposed_residual(dz2c: float, z1: float, z2: float, xi2: float,
                      gains: ControllerGains) -> float:
    return (dz2c + gains.k2 * z2 + z1 + gains.m2 * odd_pow(z2, gains.h)
            - gains.n2 * odd_pow(xi2, gains.h))


# -- conventional baseline ---------------------------------------------------
# Adaptive-NN backstepping with a command filter: no fractional-power terms
# in the virtual control, the compensator or the trainer.

def baseline_intermediate_control(e1: float, dxr: float, gains: ControllerGains) -> float:
    return -gains.k1 * e1 + dxr


def baseline_compensation_derivatives(c: CompensatorState, filter_err: float,
                                      gains: ControllerGains) -> tuple[float, float]:
    xi1, xi2 = c
    return -gains.k1 * xi1 + xi2 + filter_err, -gains.k2 * xi2 - xi1


def baseline_control_step(e1: float, e2: float, x2c: float, angle: float, nn_out: float,
                          gains: ControllerGains, params: PlantParams,
                          channel: str = "elevation") -> float:
    p = params
    if channel == "elevation":
        return p.J_alpha / p.L_a * (
            -gains.k2 * e2 - e1 + x2c + p.g / p.J_alpha * p.m * p.L_a * math.cos(angle)
            - nn_out)
    return p.J_beta / p.L_h * (-gains.k2 * e2 - e1 + x2c - nn_out)


def baseline_residual(dz2c: float, z1: float, z2: float, gains: ControllerGains) -> float:
    return dz2c + gains.k2 * z2 + z1


# -- channel orchestration ---------------------------------------------------

def virtual_control(ctrl: ChannelController, angle: float, ref: tuple[float, float],
                    xi1: float) -> tuple[float, float, float]:
    """``(e1, z1, alpha)`` for the channel variant."""
    e1 = angle - ref[0]
    z1 = e1 - xi1
    if ctrl.variant == "baseline":
        return e1, z1, baseline_intermediate_control(e1, ref[1], ctrl.gains)
    return e1, z1, intermediate_control(e1, ref[1], z1, ctrl.gains)


def make_channel(s: Sequence[float], ref: tuple[float, float], channel: str = "elevation",
                 variant: str = "proposed", **kwargs) -> ChannelController:
    """Controller with zero compensation and both differentiators started at
    their equilibrium for the initial plant state and reference."""
    ctrl = ChannelController(channel=channel, variant=variant, **kwargs)
    angle, rate = channel_pair(s, channel)
    _, _, alpha = virtual_control(ctrl, angle, ref, 0.0)
    z2 = rate - alpha
    return replace(ctrl, comp=CompensatorState(), hftd_alpha=HftdState(alpha, 0.0),
                   hftd_z=HftdState(z2, 0.0))


def channel_sample(ctrl: ChannelController, s: Sequence[float],
                   ref: tuple[float, float]) -> Diagnostics:
    """Algebraic part of one control sample: errors, virtual control, NN
    output, control value and training residual at the current instant."""
    angle, rate = channel_pair(s, ctrl.channel)
    xi1, xi2 = ctrl.comp
    x1c, x2c = ctrl.hftd_alpha
    dz2c = ctrl.hftd_z.x2c
    g = ctrl.gains
    e1, z1, alpha = virtual_control(ctrl, angle, ref, xi1)
    e2 = rate - x1c
    z2 = e2 - xi2
    nn_out = evaluate(ctrl.net, (angle, rate))
    if ctrl.variant == "baseline":
        u = baseline_control_step(e1, e2, x2c, angle, nn_out, g, ctrl.params, ctrl.channel)
        E = baseline_residual(dz2c, z1, z2, g)
    else:
        if ctrl.channel == "elevation":
            u = control_law_elevation(e1, e2, z2, x2c, angle, nn_out, g, ctrl.params)
        else:
            u = control_law_pitch(e1, e2, z2, x2c, nn_out, g, ctrl.params)
        E = proposed_residual(dz2c, z1, z2, xi2, g)
    V = 0.5 * (z1 * z1 + z2 * z2 + xi1 * xi1 + xi2 * xi2)
    diag = Diagnostics(u, e1, e2, z1, z2, xi1, xi2, E, nn_out, V, alpha, x1c, x2c, dz2c)
    for name, v in zip(Diagnostics._fields, diag):
        if not math.isfinite(v):
            raise NumericalOverflowError("control sample not finite", component=name,
                                         stage="sample")
    return diag


def channel_rates(ctrl: ChannelController, y: Sequence[float], angle: float, rate: float,
                  ref: tuple[float, float]) -> tuple[float, ...]:
    """Rates of ``(xi1, xi2, x1c, x2c, zc1, zc2)`` given the plant pair and
    reference at the same instant.

    Same arithmetic as ``virtual_control``/``compensation_derivatives``/
    ``hftd_rates``, inlined because this runs four times per step.
    """
    xi1, xi2, x1c, x2c, zc1, zc2 = y
    g = ctrl.gains
    hv = g.h.value
    e1 = angle - ref[0]
    if ctrl.variant == "baseline":
        alpha = -g.k1 * e1 + ref[1]
        dxi1 = -g.k1 * xi1 + xi2 + (x1c - alpha)
        dxi2 = -g.k2 * xi2 - xi1
    else:
        alpha = -g.k1 * e1 + ref[1] - g.m1 * _sig(e1 - xi1, hv)
        dxi1 = -g.k1 * xi1 + xi2 + (x1c - alpha) - g.n1 * _sig(xi1, hv)
        dxi2 = -g.k2 * xi2 - xi1 - g.n2 * _sig(xi2, hv)
    z2 = rate - x1c - xi2
    cfg = ctrl.hftd_cfg
    dx1c, dx2c = hftd_rates(x1c, x2c, alpha, cfg)
    dzc1, dzc2 = hftd_rates(zc1, zc2, z2, cfg)
    return dxi1, dxi2, dx1c, dx2c, dzc1, dzc2


def train(ctrl: ChannelController, s: Sequence[float], E: float) -> ChannelController:
    """One trainer iteration on the channel network."""
    x = channel_pair(s, ctrl.channel)
    step = gd_step if ctrl.variant == "baseline" else ftgd_step
    return ctrl.with_net(step(ctrl.net, x, E, ctrl.trainer))


def channel_step(ctrl: ChannelController, s: Sequence[float], ref: tuple[float, float],
                 t: float, dt: float) -> tuple[float, ChannelController, Diagnostics]:
    """Advance one channel by a control sample with the plant state held.

    Runs the sample, one trainer iteration, then one RK4 step of the
    compensator and both differentiators over ``[t, t + dt]``. Returns the
    control value, the updated controller and the sample diagnostics.
    """
    if dt <= 0:
        raise DomainError("dt must be > 0")
    try:
        diag = channel_sample(ctrl, s, ref)
        nxt = train(ctrl, s, diag.E)
    except NumericalOverflowError as exc:
        exc.stage = exc.stage or "channel_step"
        raise
    angle, rate = channel_pair(s, ctrl.channel)
    y = ctrl.internal
    h2 = 0.5 * dt

    def f(v):
        return channel_rates(ctrl, v, angle, rate, ref)

    k1 = f(y)
    k2 = f([a + h2 * b for a, b in zip(y, k1)])
    k3 = f([a + h2 * b for a, b in zip(y, k2)])
    k4 = f([a + dt * b for a, b in zip(y, k3)])
    y = [a + dt / 6.0 * (b + 2.0 * c + 2.0 * d + e)
         for a, b, c, d, e in zip(y, k1, k2, k3, k4)]
    if not all(math.isfinite(v) for v in y):
        raise NumericalOverflowError("channel internal state not finite",
                                     component="internal", stage="channel_step")
    return diag.u, nxt.with_internal(y), diag
