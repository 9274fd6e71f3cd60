"""Large-N limit of the expected density.

As N grows, the k-th closed-form term tends to ``(-1)^(k+1) k^k/k! g^k``
with ``g = pi * exp(pi - beta)``, and the resulting tree-function series
sums to ``W(g) / (1 + W(g))`` where ``W`` is the principal Lambert W branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DomainError, InstanceParams
from .spectral import closed_form_term

INV_E = math.exp(-1.0)
BRANCH_TOL = 1e-12
HALLEY_TOL = 1e-15
HALLEY_MAXITER = 50


@dataclass(frozen=True)
class LambertEval:
    z: float
    w: float
    residual: float


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    last_term_mag: float
    converged: bool


def _initial_guess(z: float) -> float:
    if z < -0.25:
        # branch-point expansion around z = -1/e
        q = 2.0 * (math.e * z + 1.0)
        return -1.0 + math.sqrt(max(q, 0.0))
    if z > math.e:
        lz = math.log(z)
        return lz - math.log(lz)
    return z * (1.0 - z) if z < 1.0 else math.log1p(z)


def lambert_w0(z: float) -> LambertEval:
    """Principal branch of the Lambert W function by Halley iteration."""
    if math.isnan(z):
        raise DomainError("lambert_w0 of NaN")
    if z < -INV_E - BRANCH_TOL:
        raise DomainError(f"lambert_w0 undefined below -1/e, got {z!r}")
    if z <= -INV_E:
        return LambertEval(z, -1.0, abs(-INV_E - z))
    if z == 0.0:
        return LambertEval(0.0, 0.0, 0.0)
    if math.isinf(z):
        return LambertEval(z, math.inf, 0.0)
    w = _initial_guess(z)
    for _ in range(HALLEY_MAXITER):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        if wp1 == 0.0:
            break
        step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        w -= step
        if abs(step) <= HALLEY_TOL * (1.0 + abs(w)):
            break
    return LambertEval(z, w, abs(w * math.exp(w) - z))


def lambert_w0_log(L: float) -> float:
    """``W(e^L)`` for arguments too large to exponentiate, solving ``w + ln w = L``."""
    if L < 1.0:
        return lambert_w0(math.exp(L)).w
    w = L - math.log(L)
    for _ in range(HALLEY_MAXITER):
        step = (w + math.log(w) - L) * w / (w + 1.0)
        w -= step
        if abs(step) <= HALLEY_TOL * w:
            break
    return w


def _ratio_of_log(L: float) -> float:
    if L <= 700.0:
        return w_ratio(math.exp(L))
    w = lambert_w0_log(L)
    return w / (1.0 + w)


def w_ratio(z: float) -> float:
    """``W(z) / (1 + W(z))``; ``-inf`` at the branch point."""
    w = lambert_w0(z).w
    if w == -1.0:
        return -math.inf
    if math.isinf(w):
        return 1.0
    return w / (1.0 + w)


def g_scaled(pi: float, beta: float) -> float:
    return pi * math.exp(pi - beta)


def h_ratio(p: float, alpha: float) -> float:
    q = 1.0 - p
    return p / q * math.exp((p - alpha) / q)


def mu_scaled(pi: float, beta: float) -> float:
    """Large-N limit of the expected density in (pi, beta)."""
    if not pi >= 0.0:
        raise DomainError(f"pi must be >= 0, got {pi!r}")
    if pi == 0.0:
        return 0.0
    return _ratio_of_log(math.log(pi) + pi - beta)


def mu_ratio(p: float, alpha: float) -> float:
    """Large-N limit of the expected density in (p, alpha).

    ``mu_ratio(0.5, 1)`` and ``mu_ratio(0.5, 0.5)`` give the two classical
    constants ``W(1/e)/(1+W(1/e))`` and ``W(1)/(1+W(1))``.
    """
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    if not alpha >= 0.0:
        raise DomainError(f"alpha must be >= 0, got {alpha!r}")
    if math.isinf(alpha):
        return 0.0
    q = 1.0 - p
    return _ratio_of_log(math.log(p / q) + (p - alpha) / q)


def limit_coefficient(k: int, pi: float, beta: float) -> float:
    """Large-N limit of the k-th closed-form term."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0 or pi == 0.0:
        return 0.0
    sign = 1.0 if k % 2 else -1.0
    lg = math.log(pi) + pi - beta
    if k > 100:
        return sign * math.exp(k * math.log(k) - math.lgamma(k + 1) + k * lg)
    return sign * k ** k / math.factorial(k) * math.exp(k * lg)


def finite_coefficient(k: int, inst: InstanceParams) -> float:
    """The k-th term of the finite-N closed form, ``1 <= k <= S0``."""
    if not 1 <= k <= inst.S0:
        raise ValueError(f"k={k} outside 1..{inst.S0}")
    return closed_form_term(inst, k).value.to_float()


def tree_series(z: float, tol: float = 1e-12, max_terms: int = 100_000_000) -> SeriesResult:
    """Partial sums of ``sum_{k>=1} (-1)^(k-1) k^k/k! z^k``.

    Terms follow ``t_{k+1} = -t_k z (1 + 1/k)^k`` from ``t_1 = z``; the
    recurrence is run on ``log|t_k|`` in vectorized chunks so that the
    slowly decaying terms near ``|z| = 1/e`` stay accurate.  Summation stops
    at the first term below ``tol``.  Convergence is only claimed for
    ``|z| < 1/e``; at and beyond the radius the terms stop shrinking
    geometrically.
    """
    if tol <= 0 or max_terms < 1:
        raise ValueError("tol must be > 0 and max_terms >= 1")
    if z == 0.0:
        return SeriesResult(0.0, 1, 0.0, True)
    inside = abs(z) < INV_E
    lz = math.log(abs(z))
    zsign = 1 if z > 0 else -1
    parts = []
    log_t = lz
    k0 = 1
    chunk = 64
    last = abs(z)
    while True:
        k = np.arange(k0, min(k0 + chunk, max_terms + 1), dtype=np.float64)
        if k.size == 0:
            break
        # log|t_k| for this chunk, continuing from log|t_{k0}|
        steps = lz + k[:-1] * np.log1p(1.0 / k[:-1])
        logs = log_t + np.concatenate(([0.0], np.cumsum(steps)))
        mags = np.exp(np.minimum(logs, 700.0))
        # negative z makes every term negative
        signs = np.where(k % 2 == 1, 1.0, -1.0) if zsign > 0 else -1.0
        terms = signs * mags
        below = np.nonzero(mags < tol)[0]
        stop = below[0] + 1 if below.size else k.size
        parts.append(math.fsum(terms[:stop]))
        last = float(mags[stop - 1])
        used = int(k[stop - 1])
        if below.size or used >= max_terms or logs[stop - 1] >= 700.0:
            break
        log_t = float(logs[-1]) + lz + float(k[-1] * np.log1p(1.0 / k[-1]))
        k0 = used + 1
        chunk = min(chunk * 2, 1 << 20)
    converged = inside and last < tol
    return SeriesResult(math.fsum(parts), used, last, converged)


def mu_series(pi: float, beta: float, tol: float = 1e-12, max_terms: int = 100_000_000) -> SeriesResult:
    if not pi > 0.0:
        raise DomainError(f"pi must be > 0, got {pi!r}")
    return tree_series(g_scaled(pi, beta), tol, max_terms)


def sufficient_condition(p: float, alpha: float) -> bool:
    """Ratio-test condition ``alpha > 1 + (1-p) ln(p/(1-p))``."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    return alpha > 1.0 + (1.0 - p) * math.log(p / (1.0 - p))


def sufficient_condition_scaled(pi: float, beta: float) -> bool:
    """Same condition in scaled variables: ``beta > pi + 1 + ln(pi)``."""
    if not pi > 0.0:
        raise DomainError(f"pi must be > 0, got {pi!r}")
    return beta > pi + 1.0 + math.log(pi)


def w_derivative(z: float) -> float:
    """``W'(z) = W(z) / (z (1 + W(z)))``, extended by continuity to ``W'(0) = 1``."""
    if z == 0.0:
        return 1.0
    r = w_ratio(z)
    if math.isinf(r):
        return math.inf
    return r / z

