"""Stand-alone verification runs: differentiator accuracy on a known
signal and offline approximation by the finite-time trainer."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..hftd import HftdConfig, HftdState, track_signal
from ..rbfnn import NnErrorSignal, TrainerConfig, basis, ftgd_step, gd_step, init_net


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"[{tag}] {self.name}: {self.value:.6g} (limit {self.limit:.6g})"


# -- differentiator ----------------------------------------------------------

@dataclass(frozen=True)
class DiffResult:
    eps: float
    dt: float
    max_signal_error: float
    max_derivative_error: float


def difftest(cfg: HftdConfig | None = None, dt: float = 1e-4, t_end: float = 10.0,
             transient: float = 0.5, signal: Callable[[float], float] = math.sin,
             derivative: Callable[[float], float] = math.cos) -> DiffResult:
    """Track ``signal`` from rest at ``signal(0)`` and report the worst
    errors after ``transient`` against the analytic derivative."""
    cfg = cfg or HftdConfig()
    t, x1c, x2c = track_signal(signal, cfg, dt, t_end, HftdState(signal(0.0), 0.0))
    mask = t >= transient
    s = np.array([signal(v) for v in t[mask]])
    ds = np.array([derivative(v) for v in t[mask]])
    return DiffResult(cfg.eps, dt, float(np.max(np.abs(x1c[mask] - s))),
                      float(np.max(np.abs(x2c[mask] - ds))))


def steady_bias(cfg: HftdConfig, rate: float) -> float:
    """Tracking offset the differentiator settles to while following a
    signal with slope ``rate`` (quasi-static balance of its position and
    damping terms), found by bisection."""
    rhs = cfg.b0 * cfg.eps * rate + cfg.b1 * math.copysign(abs(cfg.eps * rate) ** cfg.r2, rate)
    target = abs(rhs)
    lo, hi = 0.0, 1.0
    while cfg.a0 * hi + cfg.a1 * hi ** cfg.r1 < target:
        hi *= 2
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if cfg.a0 * mid + cfg.a1 * mid ** cfg.r1 < target:
            lo = mid
        else:
            hi = mid
    return math.copysign(0.5 * (lo + hi), -rhs)


def difftest_suite(cfg: HftdConfig | None = None, dt: float = 1e-4, t_end: float = 10.0,
                   transient: float = 0.5, signal_tol: float = 1e-3,
                   derivative_tol: float = 5e-2, eps_pair=(0.005, 0.02)) -> list[Check]:
    cfg = cfg or HftdConfig()
    nominal = difftest(cfg, dt, t_end, transient)
    fine_eps, coarse_eps = eps_pair
    fine_cfg = replace(cfg, eps=fine_eps)
    coarse_cfg = replace(cfg, eps=coarse_eps)
    fine = difftest(fine_cfg, min(dt, fine_eps ** 2), t_end, transient)
    coarse = difftest(coarse_cfg, min(dt, coarse_eps ** 2), t_end, transient)
    return [
        Check(f"max|x1c - sin t| over [{transient}, {t_end}] s (eps={cfg.eps})",
              nominal.max_signal_error, signal_tol, nominal.max_signal_error < signal_tol),
        Check(f"max|x2c - cos t| over [{transient}, {t_end}] s (eps={cfg.eps})",
              nominal.max_derivative_error, derivative_tol,
              nominal.max_derivative_error < derivative_tol),
        Check(f"signal error eps={fine_eps} below eps={coarse_eps}",
              fine.max_signal_error, coarse.max_signal_error,
              fine.max_signal_error < coarse.max_signal_error),
        Check(f"derivative error eps={fine_eps} below eps={coarse_eps}",
              fine.max_derivative_error, coarse.max_derivative_error,
              fine.max_derivative_error < coarse.max_derivative_error),
    ]


# -- offline training ----------------------------------------------------------

@dataclass(frozen=True)
class TrainResult:
    initial_cost: float  # mean cost of the untrained net over one cycle
    final_cost: float  # mean cost over the last `smooth_cycles` cycles
    block_costs: np.ndarray = field(repr=False)  # mean cost per block of iterations
    iterations: int = 0

    @property
    def ratio(self) -> float:
        return self.final_cost / self.initial_cost


def input_cycle(k: int, period: int, radius: float = 0.5) -> tuple[float, float]:
    th = 2.0 * math.pi * (k % period) / period
    return radius * math.sin(th), radius * math.cos(th)


def traintest(iterations: int = 100_000, neurons: int = 5, trainer: TrainerConfig | None = None,
              period: int = 1000, smooth_cycles: int = 10, blocks: int = 10,
              target: Callable[[float, float], float] = lambda a, b: math.sin(2.0 * a),
              classic: bool = False) -> TrainResult:
    """Train a fresh network online on ``target`` along a closed input cycle.

    One trainer iteration per sample with ``E = target(x) - W.Q(x)``.
    """
    trainer = trainer or TrainerConfig()
    net = init_net(neurons)
    xs = [input_cycle(k, period) for k in range(period)]
    ys = [target(*x) for x in xs]
    initial = float(np.mean([0.5 * (y - net.weights @ basis(x, net)) ** 2
                             for x, y in zip(xs, ys)]))
    step = gd_step if classic else ftgd_step
    cost = np.empty(iterations)
    for k in range(iterations):
        x = xs[k % period]
        E = ys[k % period] - float(net.weights @ basis(x, net))
        cost[k] = NnErrorSignal.of(E).Y
        net = step(net, x, E, trainer)
    window = min(iterations, smooth_cycles * period)
    n_blocks = min(blocks, iterations)
    block = iterations // n_blocks
    block_costs = cost[:block * n_blocks].reshape(n_blocks, block).mean(axis=1)
    return TrainResult(initial, float(cost[-window:].mean()), block_costs, iterations)


def cost_decreasing(res: TrainResult, floor_fraction: float = 1e-4) -> bool:
    """Block-averaged cost never rises after the first block, except once it
    is already inside the chatter floor ``floor_fraction * initial_cost``
    where fractional-power steps keep jittering."""
    b = res.block_costs
    floor = floor_fraction * res.initial_cost
    return all(b[i + 1] <= b[i] or b[i + 1] < floor for i in range(1, b.size - 1))


def traintest_suite(iterations: int = 100_000, ratio_tol: float = 0.05,
                    trainer: TrainerConfig | None = None) -> list[Check]:
    res = traintest(iterations, trainer=trainer)
    rises = np.diff(res.block_costs[1:])
    return [
        Check(f"smoothed cost after {iterations} iterations / initial cost",
              res.ratio, ratio_tol, res.ratio < ratio_tol),
        Check("block-averaged cost decreasing down to the chatter floor",
              float(rises.max(initial=-np.inf)), 0.0, cost_decreasing(res)),
    ]
