"""Exact evolution of the ticket-count Markov chain and seeded simulators.

The chain tracks ``S``, the number of removable tickets left.  From state
``k`` it stays with probability ``N/(N+k)`` and drops to ``k-1`` with
probability ``k/(N+k)``; state 0 is absorbing.

Random streams use numpy's PCG64 bit generator.  Trial ``i`` of a Monte
Carlo run with master seed ``s`` uses the 64-bit sub-seed
``SeedSequence([s, i]).generate_state(1, uint64)[0]`` (see
:func:`derive_seed`), so every trial can be replayed on its own with
:func:`simulate_trajectory`.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .params import InstanceParams

log = logging.getLogger(__name__)

Number = Union[float, Fraction]

RATIONAL_MAX_N = 64
RATIONAL_MAX_T = 4096
SEED_MAX = 2**64 - 1

# uniforms held in memory at once by monte_carlo_m
_MC_BLOCK_CELLS = 1 << 22


class NumericMode(enum.Enum):
    FLOAT64 = "float64"
    RATIONAL = "rational"

    @classmethod
    def parse(cls, value: "str | NumericMode") -> "NumericMode":
        if isinstance(value, cls):
            return value
        aliases = {"float": cls.FLOAT64, "float64": cls.FLOAT64,
                   "rational": cls.RATIONAL, "exact": cls.RATIONAL,
                   "exact-rational": cls.RATIONAL}
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown numeric mode {value!r}") from None


class CostGuardError(ValueError):
    """Exact-rational evaluation requested for an instance that is too large."""


def check_rational_cost(N: int, T: int) -> None:
    if N > RATIONAL_MAX_N or T > RATIONAL_MAX_T:
        raise CostGuardError(
            f"rational mode limited to N <= {RATIONAL_MAX_N} and T <= {RATIONAL_MAX_T}"
            f" (got N={N}, T={T})")


@dataclass(frozen=True)
class StateVector:
    """Distribution of the remaining count; ``probs[k] = P(S = k)``."""

    N: int
    probs: tuple

    @property
    def K(self) -> int:
        return len(self.probs) - 1

    @property
    def exact(self) -> bool:
        return bool(self.probs) and isinstance(self.probs[0], Fraction)

    @classmethod
    def point_mass(cls, N: int, k: int, mode: NumericMode = NumericMode.FLOAT64) -> "StateVector":
        one, zero = (Fraction(1), Fraction(0)) if mode is NumericMode.RATIONAL else (1.0, 0.0)
        probs = [zero] * (k + 1)
        probs[k] = one
        return cls(N, tuple(probs))

    def total(self) -> Number:
        if self.exact:
            return sum(self.probs, Fraction(0))
        return math.fsum(self.probs)


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int


def transition_step(state: StateVector) -> StateVector:
    """Apply the transition matrix once."""
    N, p = state.N, state.probs
    K = len(p) - 1
    if state.exact:
        new = [p[k] * Fraction(N, N + k) for k in range(K + 1)]
        for k in range(K):
            new[k] += p[k + 1] * Fraction(k + 1, N + k + 1)
    else:
        new = [p[k] * N / (N + k) for k in range(K + 1)]
        for k in range(K):
            new[k] += p[k + 1] * (k + 1) / (N + k + 1)
    return StateVector(N, tuple(new))


def _evolve_float(N: int, S0: int, T: int) -> np.ndarray:
    k = np.arange(S0 + 1, dtype=np.float64)
    stay = N / (N + k)
    leave = k / (N + k)
    z = np.zeros(S0 + 1)
    z[S0] = 1.0
    lo = S0
    for _ in range(T):
        # support after t steps is [max(0, S0 - t), S0]
        nxt = z[lo:] * stay[lo:]
        nxt[:-1] += z[lo + 1:] * leave[lo + 1:]
        if lo > 0:
            z[lo - 1] = z[lo] * leave[lo]
        z[lo:] = nxt
        lo = max(lo - 1, 0)
    return z


def evolve_exact(inst: InstanceParams, mode: "NumericMode | str" = NumericMode.FLOAT64) -> StateVector:
    """Distribution of ``S`` after ``inst.T`` draws, starting from ``S = inst.S0``."""
    mode = NumericMode.parse(mode)
    N, S0, T = inst.N, inst.S0, inst.T
    if mode is NumericMode.RATIONAL:
        check_rational_cost(N, T)
        state = StateVector.point_mass(N, S0, mode)
        for _ in range(T):
            state = transition_step(state)
        return state
    z = _evolve_float(N, S0, T)
    return StateVector(N, tuple(float(x) for x in z))


def density_weights(N: int, K: int, exact: bool = False) -> list:
    if exact:
        return [Fraction(k, N + k) for k in range(K + 1)]
    return [k / (N + k) for k in range(K + 1)]


def expected_density(state: StateVector) -> Number:
    """Expected value of ``S / (N + S)`` under ``state``."""
    w = density_weights(state.N, state.K, state.exact)
    if state.exact:
        return sum((a * b for a, b in zip(w, state.probs)), Fraction(0))
    return math.fsum(a * b for a, b in zip(w, state.probs))


def m_exact(inst: InstanceParams, mode: "NumericMode | str" = NumericMode.FLOAT64) -> Number:
    """Expected final density by dynamic programming; the reference value."""
    mode = NumericMode.parse(mode)
    if inst.S0 == 0:
        return Fraction(0) if mode is NumericMode.RATIONAL else 0.0
    return expected_density(evolve_exact(inst, mode))


def derive_seed(seed: int, index: int) -> int:
    """64-bit sub-seed for trial ``index`` of a run seeded with ``seed``."""
    _check_seed(seed)
    ss = np.random.SeedSequence([seed, index])
    return int(ss.generate_state(1, np.uint64)[0])


def _check_seed(seed: int) -> None:
    if not 0 <= seed <= SEED_MAX:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")


def _generator(seed: int) -> np.random.Generator:
    _check_seed(seed)
    return np.random.Generator(np.random.PCG64(seed))


def simulate_trajectory(inst: InstanceParams, seed: int) -> int:
    """Final count ``S(T)`` of one simulated run.

    Step ``t`` removes a ticket when the ``t``-th uniform of the stream is
    below ``S/(N+S)``.
    """
    N, S = inst.N, inst.S0
    if inst.T == 0 or S == 0:
        return S
    u = _generator(seed).random(inst.T)
    for x in u:
        if x < S / (N + S):
            S -= 1
            if S == 0:
                break
    return S


def simulate_counts(inst: InstanceParams, seeds: Sequence[int]) -> np.ndarray:
    """Vectorized :func:`simulate_trajectory` over many seeds."""
    N, T = inst.N, inst.T
    seeds = list(seeds)
    S = np.full(len(seeds), inst.S0, dtype=np.int64)
    if T == 0 or inst.S0 == 0 or not seeds:
        return S
    u = np.empty((len(seeds), T))
    for i, s in enumerate(seeds):
        u[i] = _generator(s).random(T)
    for t in range(T):
        S -= u[:, t] < S / (N + S)
    return S


def monte_carlo_m(inst: InstanceParams, trials: int, seed: int) -> McEstimate:
    """Monte Carlo estimate of the expected final density."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    _check_seed(seed)
    N = inst.N
    if inst.S0 == 0:
        return McEstimate(0.0, 0.0, trials, seed)
    block = max(1, _MC_BLOCK_CELLS // max(inst.T, 1))
    values = []
    for start in range(0, trials, block):
        idx = range(start, min(trials, start + block))
        S = simulate_counts(inst, [derive_seed(seed, i) for i in idx])
        values.extend((S / (N + S)).tolist())
    mean = math.fsum(values) / trials
    if trials == 1:
        return McEstimate(mean, 0.0, 1, seed)
    var = math.fsum((v - mean) ** 2 for v in values) / (trials - 1)
    return McEstimate(mean, math.sqrt(var / trials), trials, seed)


def simulate_set_lottery(N_half: int, T: int, seed: int) -> int:
    """Run the lottery on explicit sets and return the tracked-set size.

    The tracked set is the odd numbers of ``1..2*N_half``, the even numbers
    are never removed.  Each step draws uniformly from what is left.
    """
    if N_half < 1:
        raise ValueError("N_half must be >= 1")
    if T < 0:
        raise ValueError("T must be >= 0")
    tracked = set(range(1, 2 * N_half + 1, 2))
    pool = list(range(1, 2 * N_half + 1))
    where = {x: i for i, x in enumerate(pool)}
    if T == 0:
        return len(tracked)
    rng = _generator(seed)
    for _ in range(T):
        if not tracked:
            break
        x = pool[int(rng.integers(len(pool)))]
        if x in tracked:
            tracked.remove(x)
            # swap-remove x from the pool
            i = where.pop(x)
            last = pool.pop()
            if last != x:
                pool[i] = last
                where[last] = i
    return len(tracked)
