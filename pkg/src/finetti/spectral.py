"""Analytic eigen-structure of the transition matrix and the closed form for m_N.

The transition matrix ``M`` (column = current state) is lower-bidiagonal
with eigenvalues ``N/(N+k)``.  Its eigenvectors form a lower-triangular
matrix ``V`` with an explicit upper-triangular inverse, and pushing the
density weights through ``V Lambda^T V^{-1}`` collapses ``m_N`` into a
single alternating sum over ``k = 1..S0``::

    m_N = sum_k (-1)^(k+1) C(S0, k) (k/(N+k))^k ((N+k)/N)^(S0 - T - 1)

Nothing here calls an eigensolver; all entries are closed-form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional

import mpmath

from .markov import NumericMode, check_rational_cost
from .params import InstanceParams

log = logging.getLogger(__name__)

# sum of |terms| above which float summation is abandoned for extended precision
ESCALATE_ABS_SUM = 1e3
CONDITION_WARN = 1e12


@dataclass(frozen=True)
class SignedLogValue:
    """A real number stored as ``sign * exp(log_mag)``."""

    sign: int
    log_mag: float = -math.inf

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")

    @classmethod
    def zero(cls) -> "SignedLogValue":
        return cls(0, -math.inf)

    @classmethod
    def from_float(cls, x: float) -> "SignedLogValue":
        if x == 0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_mag)

    def __float__(self) -> float:
        return self.to_float()

    def __neg__(self) -> "SignedLogValue":
        return SignedLogValue(-self.sign, self.log_mag)

    def __mul__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0 or other.sign == 0:
            return SignedLogValue.zero()
        return SignedLogValue(self.sign * other.sign, self.log_mag + other.log_mag)

    def __add__(self, other: "SignedLogValue") -> "SignedLogValue":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_mag >= other.log_mag else (other, self)
        r = math.exp(small.log_mag - big.log_mag)
        if big.sign == small.sign:
            return SignedLogValue(big.sign, big.log_mag + math.log1p(r))
        if r == 1.0:
            return SignedLogValue.zero()
        return SignedLogValue(big.sign, big.log_mag + math.log1p(-r))


@dataclass(frozen=True)
class ClosedFormTerm:
    k: int
    value: SignedLogValue


@dataclass(frozen=True)
class TruncatedMatrix:
    """Leading ``(K+1) x (K+1)`` block of one of the infinite matrices.

    Indexed ``[row, column]`` with column = current state, so ``M`` is
    upper-bidiagonal and both ``V`` and its inverse are upper-triangular.
    """

    N: int
    K: int
    entries: tuple

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def is_lower_triangular(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(self.K + 1) for j in range(i + 1, self.K + 1))

    def is_upper_triangular(self) -> bool:
        return all(self.entries[i][j] == 0 for i in range(self.K + 1) for j in range(i))

    def is_upper_bidiagonal(self) -> bool:
        return self.is_upper_triangular() and all(
            self.entries[i][j] == 0 for i in range(self.K + 1) for j in range(i + 2, self.K + 1))


@dataclass(frozen=True)
class ClosedFormResult:
    value: float
    terms: int
    abs_sum: float
    condition: float
    escalated: bool


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def eigenvalue(N: int, k: int, exact: bool = False):
    if exact:
        return Fraction(N, N + k)
    return N / (N + k)


def eigenvector_entry(N: int, k: int, n: int, mode: "NumericMode | str" = NumericMode.RATIONAL):
    """Entry ``n`` of the eigenvector for eigenvalue ``N/(N+k)``, scaled so entry ``k`` is 1."""
    mode = NumericMode.parse(mode)
    exact = mode is NumericMode.RATIONAL
    if n > k:
        return Fraction(0) if exact else SignedLogValue.zero()
    d = k - n
    sign = -1 if d % 2 else 1
    if exact:
        return sign * Fraction(N + k, N) ** d * Fraction(N + n, N + k) * math.comb(k, n)
    lm = d * math.log((N + k) / N) + math.log((N + n) / (N + k)) + _log_binom(k, n)
    return SignedLogValue(sign, lm)


def inverse_entry(N: int, n: int, k: int, mode: "NumericMode | str" = NumericMode.RATIONAL):
    """Row ``n``, column ``k`` of the inverse eigenvector matrix."""
    mode = NumericMode.parse(mode)
    exact = mode is NumericMode.RATIONAL
    if k < n:
        return Fraction(0) if exact else SignedLogValue.zero()
    if exact:
        return Fraction(N + n, N) ** (k - n) * math.comb(k, n)
    return SignedLogValue(1, (k - n) * math.log((N + n) / N) + _log_binom(k, n))


def nu_v_entry(N: int, m: int, mode: "NumericMode | str" = NumericMode.FLOAT64):
    """Component ``m`` of the row vector (density weights) x V."""
    exact = NumericMode.parse(mode) is NumericMode.RATIONAL
    if m == 0:
        return Fraction(0) if exact else 0.0
    sign = 1 if m % 2 else -1
    if exact:
        return sign * Fraction(m, N) ** m * Fraction(N, N + m)
    return sign * math.exp(m * math.log(m / N) + math.log(N / (N + m)))



def transition_matrix(N: int, K: int, mode: "NumericMode | str" = NumericMode.RATIONAL) -> TruncatedMatrix:
    exact = NumericMode.parse(mode) is NumericMode.RATIONAL
    rows = [[Fraction(0)] * (K + 1) for _ in range(K + 1)]
    for k in range(K + 1):
        rows[k][k] = Fraction(N, N + k)
        if k > 0:
            rows[k - 1][k] = Fraction(k, N + k)
    if not exact:
        rows = [[float(x) for x in r] for r in rows]
    return TruncatedMatrix(N, K, tuple(tuple(r) for r in rows))


def eigenvector_matrix(N: int, K: int, mode: "NumericMode | str" = NumericMode.RATIONAL,
                       flip: Optional[tuple] = None) -> TruncatedMatrix:
    """Matrix whose column ``k`` is eigenvector ``k``.

    Float entries are the correctly rounded values of the exact ones.
    ``flip=(n, k)`` negates one entry; used to check that verification fails.
    """
    exact = NumericMode.parse(mode) is NumericMode.RATIONAL
    rows = [[eigenvector_entry(N, k, n) for k in range(K + 1)] for n in range(K + 1)]
    if flip is not None:
        n, k = flip
        rows[n][k] = -rows[n][k]
    if not exact:
        rows = [[float(x) for x in r] for r in rows]
    return TruncatedMatrix(N, K, tuple(tuple(r) for r in rows))


def inverse_matrix(N: int, K: int, mode: "NumericMode | str" = NumericMode.RATIONAL) -> TruncatedMatrix:
    exact = NumericMode.parse(mode) is NumericMode.RATIONAL
    rows = [[inverse_entry(N, n, k) for k in range(K + 1)] for n in range(K + 1)]
    if not exact:
        rows = [[float(x) for x in r] for r in rows]
    return TruncatedMatrix(N, K, tuple(tuple(r) for r in rows))


def _exact_dot(xs, ys) -> Fraction:
    # products of floats summed without rounding
    return sum((Fraction(a) * Fraction(b) for a, b in zip(xs, ys)), Fraction(0))


def verify_eigen_residual(N: int, K: int, mode: "NumericMode | str" = NumericMode.RATIONAL,
                          fault: bool = False):
    """Largest entry of ``M v - lambda_k v`` over rows ``0..K``, ``k < K``.

    ``v`` is eigenvector ``k`` rescaled to unit max-norm, which makes the
    float residual a relative one.  In float mode ``M``, ``lambda_k`` and
    ``v`` are rounded to float64 and the residual is accumulated exactly,
    so only representation error shows up.
    """
    if not 1 <= K <= 64:
        raise ValueError("truncation K must lie in 1..64")
    mode = NumericMode.parse(mode)
    exact = mode is NumericMode.RATIONAL
    M = transition_matrix(N, K, mode)
    V = eigenvector_matrix(N, K, NumericMode.RATIONAL, flip=(0, 1) if fault else None)
    worst = Fraction(0)
    for k in range(K):
        col = [V[n, k] for n in range(K + 1)]
        scale = max(abs(x) for x in col)
        col = [x / scale for x in col]
        lam = eigenvalue(N, k, exact=True)
        if not exact:
            col = [Fraction(float(x)) for x in col]
            lam = Fraction(float(lam))
        for j in range(K + 1):
            r = _exact_dot(M.entries[j], col) - lam * col[j]
            worst = max(worst, abs(r))
    return worst if exact else float(worst)


def verify_inverse_identity(N: int, K: int, mode: "NumericMode | str" = NumericMode.RATIONAL,
                            fault: bool = False):
    """Largest deviation of ``V^{-1} V`` from the identity on the leading ``K x K`` block."""
    if not 1 <= K <= 32:
        raise ValueError("truncation K must lie in 1..32")
    mode = NumericMode.parse(mode)
    exact = mode is NumericMode.RATIONAL
    if not exact and K > 16:
        raise ValueError("float mode is limited to K <= 16; use rational mode")
    n = K - 1
    U = inverse_matrix(N, n, mode)
    V = eigenvector_matrix(N, n, mode, flip=(0, 1) if fault else None)
    worst = Fraction(0)
    for i in range(K):
        for j in range(K):
            s = _exact_dot(U.entries[i], [V[m, j] for m in range(K)])
            worst = max(worst, abs(s - (1 if i == j else 0)))
    return worst if exact else float(worst)


def closed_form_term(inst: InstanceParams, k: int, mode: "NumericMode | str" = NumericMode.FLOAT64):
    """Summand ``k`` of the closed form; a Fraction in rational mode, else a ClosedFormTerm."""
    mode = NumericMode.parse(mode)
    N, S0, T = inst.N, inst.S0, inst.T
    if not 0 <= k <= S0:
        raise ValueError(f"term index k={k} outside 0..{S0}")
    e = S0 - T - 1
    sign = 1 if k % 2 else -1
    if mode is NumericMode.RATIONAL:
        if k == 0:
            return Fraction(0)
        return sign * math.comb(S0, k) * Fraction(k, N + k) ** k * Fraction(N + k, N) ** e
    if k == 0:
        return ClosedFormTerm(0, SignedLogValue.zero())
    lm = _log_binom(S0, k) + k * math.log(k / (N + k)) + e * math.log1p(k / N)
    return ClosedFormTerm(k, SignedLogValue(sign, lm))


def closed_form_terms(inst: InstanceParams) -> List[ClosedFormTerm]:
    return [closed_form_term(inst, k) for k in range(1, inst.S0 + 1)]


def _closed_form_mp(inst: InstanceParams, digits: int) -> float:
    N, S0, T = inst.N, inst.S0, inst.T
    e = S0 - T - 1
    with mpmath.workdps(digits):
        terms = []
        for k in range(1, S0 + 1):
            t = mpmath.mpf(math.comb(S0, k)) * (mpmath.mpf(k) / (N + k)) ** k \
                * (mpmath.mpf(N + k) / N) ** e
            terms.append(t if k % 2 else -t)
        return float(mpmath.fsum(terms))


def closed_form_details(inst: InstanceParams) -> ClosedFormResult:
    """Float evaluation of the closed form with its conditioning.

    Terms are formed in signed-log space and summed with ``math.fsum``.  When
    the magnitudes make double-precision cancellation unreliable the sum is
    redone in extended precision with enough digits to absorb it.
    """
    if inst.S0 == 0:
        return ClosedFormResult(0.0, 0, 0.0, 1.0, False)
    terms = closed_form_terms(inst)
    logs = [t.value.log_mag for t in terms]
    top = max(logs)
    abs_sum_log = top + math.log(math.fsum(math.exp(x - top) for x in logs))
    escalated = abs_sum_log > math.log(ESCALATE_ABS_SUM)
    if escalated:
        digits = 25 + int(math.ceil(abs_sum_log / math.log(10)))
        value = _closed_form_mp(inst, digits)
    else:
        value = math.fsum(t.value.to_float() for t in terms)
    if value == 0.0:
        condition = math.inf
    else:
        condition = math.exp(abs_sum_log - math.log(abs(value)))
    if condition > CONDITION_WARN:
        log.warning("closed form for N=%d S0=%d T=%d is ill-conditioned (%.3g)%s",
                    inst.N, inst.S0, inst.T, condition,
                    "; summed in extended precision" if escalated else "")
    abs_sum = math.exp(abs_sum_log) if abs_sum_log < 709 else math.inf
    return ClosedFormResult(value, len(terms), abs_sum, condition, escalated)


def closed_form_m(inst: InstanceParams, mode: "NumericMode | str" = NumericMode.FLOAT64):
    """Expected final density from the spectral closed form."""
    mode = NumericMode.parse(mode)
    if mode is NumericMode.RATIONAL:
        check_rational_cost(inst.N, inst.T)
        return sum((closed_form_term(inst, k, mode) for k in range(1, inst.S0 + 1)), Fraction(0))
    return closed_form_details(inst).value
