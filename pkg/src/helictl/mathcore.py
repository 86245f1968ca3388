"""Sign-preserving power primitives and the two elementary inequalities
(power-mean and Young type) that the stability argument leans on."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class OddFraction:
    """Exponent ``h = numerator / denominator`` with both parts odd and positive.

    A ratio of odd integers keeps ``z**h`` real and sign-preserving for
    negative ``z``; ``value`` is what the evaluation path actually uses.
    """

    numerator: int
    denominator: int

    def __post_init__(self):
        for name in ("numerator", "denominator"):
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise DomainError(f"{name} must be an int, got {v!r}")
            if v <= 0 or v % 2 == 0:
                raise DomainError(f"{name} must be a positive odd integer, got {v}")
        if self.numerator >= self.denominator:
            raise DomainError(
                f"h = {self.numerator}/{self.denominator} must be < 1")

    @property
    def value(self) -> float:
        return self.numerator / self.denominator

    def reduced(self) -> "OddFraction":
        f = Fraction(self.numerator, self.denominator)
        return OddFraction(f.numerator, f.denominator)

    @classmethod
    def parse(cls, spec) -> "OddFraction":
        """Accept ``OddFraction``, ``"3/5"``, ``[3, 5]`` or a float such as 0.6."""
        if isinstance(spec, OddFraction):
            return spec
        if isinstance(spec, str):
            if "/" in spec:
                num, den = spec.split("/", 1)
                return cls(int(num), int(den))
            spec = float(spec)
        if isinstance(spec, (list, tuple)):
            if len(spec) != 2:
                raise DomainError(f"expected [numerator, denominator], got {spec!r}")
            return cls(int(spec[0]), int(spec[1]))
        if isinstance(spec, (int, float)):
            f = Fraction(spec).limit_denominator(999)
            if f.denominator % 2 == 0 or f.numerator % 2 == 0:
                raise DomainError(f"{spec} is not a ratio of odd integers")
            return cls(f.numerator, f.denominator)
        raise DomainError(f"cannot interpret {spec!r} as an odd fraction")

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


def sig_pow(x, p: float):
    """Return ``|x|**p * sign(x)``.

    Works on Python floats and on numpy arrays (elementwise). Returns exactly
    zero at ``x == 0`` for every ``p``, including ``p == 0``.
    """
    if not 0.0 <= p < math.inf:
        raise DomainError(f"exponent must be finite and >= 0, got {p}")
    if isinstance(x, np.ndarray):
        if not np.isfinite(x).all():
            raise DomainError("sig_pow: non-finite input")
        return np.sign(x) * np.abs(x) ** p
    if not math.isfinite(x):
        raise DomainError(f"sig_pow: non-finite input {x}")
    if x == 0.0:
        return 0.0
    return math.copysign(abs(x) ** p, x)


def _sig(x: float, p: float) -> float:
    # unchecked scalar sig_pow for inner loops; nan/inf propagate
    if x == 0.0:
        return 0.0
    return math.copysign(abs(x) ** p, x)


def odd_pow(x, h: OddFraction):
    """Real odd-ratio power ``x**h``, evaluated as ``sign(x)|x|**h``."""
    if isinstance(x, float):
        return _sig(x, h.value) if math.isfinite(x) else sig_pow(x, h.value)
    return sig_pow(x, h.value)


def power_mean_bounds(ys: Sequence[float], gamma: float) -> tuple[float, float, float]:
    """Three sides of the power-mean chain for exponent ``gamma`` in (0, 1].

    Returns ``((sum |y|)**g, sum |y|**g, n**(1-g) * (sum |y|)**g)``; the
    chain ``lhs <= mid <= rhs`` holds for every input.
    """
    ys = [float(y) for y in ys]
    if not ys:
        raise DomainError("power_mean_bounds needs at least one value")
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    total = sum(abs(y) for y in ys)
    lhs = total ** gamma
    mid = sum(abs(y) ** gamma for y in ys)
    rhs = len(ys) ** (1.0 - gamma) * lhs
    return lhs, mid, rhs


def young_bound(chi1: float, chi2: float, c1: float, c2: float) -> float:
    """Upper bound on ``|chi1|**c1 * |chi2|**c2`` (weighted Young inequality)."""
    if not (c1 > 0 and c2 > 0):
        raise DomainError(f"exponents must be positive, got c1={c1}, c2={c2}")
    s = c1 + c2
    return c1 / s * abs(chi1) ** s + c2 / s * abs(chi2) ** s
