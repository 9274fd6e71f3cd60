"""Parameterizations of the lottery and finite instances.

Two equivalent parameter pairs are used throughout:

* ``(p, alpha)``: natural density of the tracked set and the number of
  iterations per natural number.
* ``(pi, beta)``: the scaled pair ``pi = p / (1 - p)``, ``beta = (1 + pi) * alpha``
  which is what the Markov chain is written in.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

# distance to the nearest integer under which pi*N / beta*N snap to it
FLOOR_SNAP = 1e-9


class DomainError(ValueError):
    """Raised when a parameter lies outside its admissible range."""


@dataclass(frozen=True)
class RatioParams:
    p: float
    alpha: float

    def __post_init__(self):
        # p = 0 only arises as the image of pi = 0 under to_ratio
        if not (0.0 <= self.p < 1.0) or math.isnan(self.p):
            raise DomainError(f"p must lie in [0, 1), got {self.p!r}")
        if not self.alpha >= 0.0:
            raise DomainError(f"alpha must be >= 0, got {self.alpha!r}")


@dataclass(frozen=True)
class ScaledParams:
    pi: float
    beta: float

    def __post_init__(self):
        if not self.pi >= 0.0 or math.isinf(self.pi):
            raise DomainError(f"pi must be finite and >= 0, got {self.pi!r}")
        if not self.beta >= 0.0 or math.isinf(self.beta):
            raise DomainError(f"beta must be finite and >= 0, got {self.beta!r}")


@dataclass(frozen=True)
class InstanceParams:
    """A concrete finite lottery.

    ``N`` non-removable tickets, ``S0`` removable ones, ``T`` draws.
    """

    N: int
    pi: float
    beta: float
    S0: int
    T: int

    def __post_init__(self):
        if self.N < 1:
            raise DomainError(f"N must be >= 1, got {self.N}")
        if self.S0 < 0 or self.T < 0:
            raise DomainError("S0 and T must be non-negative")

    @classmethod
    def from_counts(cls, N: int, S0: int, T: int) -> "InstanceParams":
        """Build an instance directly from integer counts."""
        return cls(N=N, pi=S0 / N, beta=T / N, S0=S0, T=T)

    @property
    def initial_density(self) -> float:
        return self.S0 / (self.N + self.S0)


def to_scaled(r: RatioParams) -> ScaledParams:
    if not 0.0 < r.p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {r.p!r}")
    q = 1.0 - r.p
    return ScaledParams(pi=r.p / q, beta=r.alpha / q)


def to_ratio(s: ScaledParams) -> RatioParams:
    d = 1.0 + s.pi
    return RatioParams(p=s.pi / d, alpha=s.beta / d)


def snapped_floor(x: float) -> int:
    """Floor of ``x``, snapping to the nearest integer when within FLOOR_SNAP.

    Guards against products like ``0.1 * 30`` landing a hair below 3.
    """
    if math.isnan(x) or math.isinf(x) or abs(x) > sys.maxsize:
        raise OverflowError(f"{x!r} is not representable as an integer count")
    r = round(x)
    if abs(x - r) <= FLOOR_SNAP:
        return int(r)
    return math.floor(x)


def instantiate(s: ScaledParams, N: int) -> InstanceParams:
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise DomainError(f"N must be a positive integer, got {N!r}")
    S0 = snapped_floor(s.pi * N)
    T = snapped_floor(s.beta * N)
    return InstanceParams(N=N, pi=s.pi, beta=s.beta, S0=S0, T=T)
