"""Gaussian RBF network used as the lumped-disturbance estimator, and the
online trainers that adapt its weights, centers and widths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, NumericalOverflowError
from .mathcore import odd_pow, sig_pow


@dataclass(frozen=True, eq=False)
class RbfNet:
    """Single hidden layer of ``M`` Gaussian units over an ``N``-dim input.

    Arrays are treated as immutable; training returns a new network.
    """

    weights: np.ndarray  # (M,)
    centers: np.ndarray  # (M, N)
    widths: np.ndarray  # (M,)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        c = np.asarray(self.centers, dtype=float)
        d = np.asarray(self.widths, dtype=float)
        if c.ndim == 1:
            c = c.reshape(-1, 1)
        if w.ndim != 1 or w.size < 1:
            raise DomainError("weights must be a non-empty vector")
        if c.shape[0] != w.size or d.shape != w.shape:
            raise DomainError(
                f"shape mismatch: weights {w.shape}, centers {c.shape}, widths {d.shape}")
        if not (np.isfinite(w).all() and np.isfinite(c).all() and np.isfinite(d).all()):
            raise NumericalOverflowError("RBF network has non-finite entries",
                                         component="net", stage="rbfnn")
        if (d <= 0).any():
            raise DomainError("RBF widths must be positive")
        for name, arr in (("weights", w), ("centers", c), ("widths", d)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @classmethod
    def _trusted(cls, weights, centers, widths) -> "RbfNet":
        # skips validation; callers guarantee shapes, finiteness and positivity
        net = object.__new__(cls)
        for name, arr in (("weights", weights), ("centers", centers), ("widths", widths)):
            arr.flags.writeable = False
            object.__setattr__(net, name, arr)
        return net

    @property
    def n_neurons(self) -> int:
        return self.weights.size

    @property
    def n_inputs(self) -> int:
        return self.centers.shape[1]

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def __eq__(self, other):
        if not isinstance(other, RbfNet):
            return NotImplemented
        return (np.array_equal(self.weights, other.weights)
                and np.array_equal(self.centers, other.centers)
                and np.array_equal(self.widths, other.widths))

    def flat(self) -> dict[str, float]:
        """Flattened ``w{i}``, ``mu{i}_{j}``, ``delta{i}`` columns (1-based)."""
        out = {}
        for i in range(self.n_neurons):
            out[f"w{i + 1}"] = float(self.weights[i])
        for i in range(self.n_neurons):
            for j in range(self.n_inputs):
                out[f"mu{i + 1}_{j + 1}"] = float(self.centers[i, j])
        for i in range(self.n_neurons):
            out[f"delta{i + 1}"] = float(self.widths[i])
        return out


@dataclass(frozen=True)
class TrainerConfig:
    learning_rate: float = 0.005
    p: float = 0.6
    width_floor: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.learning_rate < 1.0:
            raise DomainError(f"learning rate must lie in (0, 1), got {self.learning_rate}")
        # p == 1 is the classic (non finite-time) rule used by the baseline
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"exponent p must lie in [0, 1], got {self.p}")
        if not self.width_floor > 0:
            raise DomainError(f"width floor must be > 0, got {self.width_floor}")


class NnErrorSignal(NamedTuple):
    E: float
    Y: float

    @classmethod
    def of(cls, E: float) -> "NnErrorSignal":
        return cls(E, 0.5 * E * E)


def init_net(n_neurons: int = 5, box: Sequence[Sequence[float]] = ((-0.5, 0.5), (-1.0, 1.0)),
             width: float = 1.0) -> RbfNet:
    """Zero weights and centers spread along the diagonal of ``box``."""
    if n_neurons < 1:
        raise DomainError("need at least one neuron")
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise DomainError("box must be a sequence of (low, high) pairs")
    if n_neurons == 1:
        centers = box.mean(axis=1)[None, :]
    else:
        frac = np.linspace(0.0, 1.0, n_neurons)[:, None]
        centers = box[:, 0] + frac * (box[:, 1] - box[:, 0])
    return RbfNet(np.zeros(n_neurons), centers, np.full(n_neurons, float(width)))


def _input(x, net: RbfNet) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.size != net.n_inputs:
        raise DomainError(f"input has dimension {x.size}, network expects {net.n_inputs}")
    return x


def basis(x, net: RbfNet) -> np.ndarray:
    """Activations ``q_i = exp(-||x - mu_i||^2 / delta_i^2)``, each in (0, 1]."""
    x = _input(x, net)
    diff = x - net.centers
    return np.exp(-np.einsum("ij,ij->i", diff, diff) / net.widths ** 2)


def evaluate(net: RbfNet, x) -> float:
    return float(net.weights @ basis(x, net))


def descent_terms(net: RbfNet, x, E: float):
    """Descent directions for ``Y = E^2/2`` with ``E = target - W.Q(x)``.

    Returns ``(dw, dmu, ddelta)`` equal to minus the partial derivatives of
    ``Y`` with ``E`` treated as that residual.
    """
    x = _input(x, net)
    diff = x - net.centers
    dist2 = np.einsum("ij,ij->i", diff, diff)
    w, d = net.weights, net.widths
    d2 = d * d
    q = np.exp(-dist2 / d2)
    dw = E * q
    # dq/dmu and dq/ddelta each carry a factor 2 from the squared distance
    g = (2.0 * E) * w * q / d2
    dmu = g[:, None] * diff
    ddelta = g * dist2 / d
    return dw, dmu, ddelta


def _apply(net: RbfNet, dw, dmu, ddelta, floor: float) -> RbfNet:
    w = net.weights + dw
    c = net.centers + dmu
    d = np.maximum(net.widths + ddelta, floor)
    if not (math.isfinite(w.sum()) and math.isfinite(c.sum()) and math.isfinite(d.sum())):
        raise NumericalOverflowError("network parameters not finite", component="net",
                                     stage="ftgd")
    return RbfNet._trusted(w, c, d)


def ftgd_step(net: RbfNet, x, E: float, cfg: TrainerConfig) -> RbfNet:
    """One finite-time gradient-descent iteration.

    Every parameter moves by ``lr * sig(delta)**p``; all increments are
    computed from the pre-update parameters. Widths are floored at
    ``cfg.width_floor``.
    """
    if not math.isfinite(E):
        raise NumericalOverflowError("training residual not finite", component="E",
                                     stage="ftgd")
    dw, dmu, ddelta = descent_terms(net, x, E)
    lr, p = cfg.learning_rate, cfg.p
    return _apply(net, lr * sig_pow(dw, p), lr * sig_pow(dmu, p), lr * sig_pow(ddelta, p),
                  cfg.width_floor)


def gd_step(net: RbfNet, x, E: float, cfg: TrainerConfig) -> RbfNet:
    """Classic gradient descent (increment ``lr * delta``); ``cfg.p`` is ignored."""
    if not math.isfinite(E):
        raise NumericalOverflowError("training residual not finite", component="E",
                                     stage="gd")
    dw, dmu, ddelta = descent_terms(net, x, E)
    lr = cfg.learning_rate
    return _apply(net, lr * dw, lr * dmu, lr * ddelta, cfg.width_floor)


def nn_residual(dz2c: float, z1: float, z2: float, xi2: float, gains) -> NnErrorSignal:
    """Online training residual built from the compensated-error dynamics.

    ``gains`` needs ``k2``, ``m2``, ``n2`` and ``h``. Once the differentiator
    has settled this equals the estimation error ``d - W.Q(x)``.
    """
    E = dz2c + gains.k2 * z2 + z1 + gains.m2 * odd_pow(z2, gains.h) - gains.n2 * odd_pow(xi2, gains.h)
    return NnErrorSignal.of(E)
