"""Self-verification suites run by ``finetti verify``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from ..limits import tree_series, w_ratio
from ..markov import NumericMode, m_exact
from ..params import ScaledParams, instantiate
from ..spectral import closed_form_m, verify_eigen_residual, verify_inverse_identity

MAX_TRUNC = 32
GRID_PI = (0.5, 1.0, 2.0)
GRID_BETA = (0.5, 1.0, 2.0)
RATIONAL_ORACLE_MAX_N = 20
SERIES_TOL = 1e-10


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    detail: str


def eigen_suite(max_n: int, trunc: int, fault: bool = False) -> SuiteResult:
    bad = [N for N in range(1, max_n + 1) if verify_eigen_residual(N, trunc, fault=fault) != 0]
    return SuiteResult("eigen-residual", not bad,
                       f"N=1..{max_n} K={trunc} rational" + (f"; nonzero at N={bad}" if bad else ""))


def inverse_suite(max_n: int, trunc: int, fault: bool = False) -> SuiteResult:
    bad = [N for N in range(1, max_n + 1) if verify_inverse_identity(N, trunc, fault=fault) != 0]
    return SuiteResult("inverse-identity", not bad,
                       f"N=1..{max_n} K={trunc} rational" + (f"; nonzero at N={bad}" if bad else ""))


def oracle_suite(max_n: int, tol: float) -> SuiteResult:
    worst = 0.0
    mismatched = []
    for N in range(1, max_n + 1):
        for pi in GRID_PI:
            for beta in GRID_BETA:
                inst = instantiate(ScaledParams(pi, beta), N)
                worst = max(worst, abs(closed_form_m(inst) - m_exact(inst)))
                if N <= RATIONAL_ORACLE_MAX_N:
                    if closed_form_m(inst, NumericMode.RATIONAL) != m_exact(inst, NumericMode.RATIONAL):
                        mismatched.append((N, pi, beta))
    ok = worst <= tol and not mismatched
    detail = f"max |closed - dp| = {worst:.3g} (tol {tol:g})"
    if mismatched:
        detail += f"; rational mismatch at {mismatched[:3]}"
    return SuiteResult("closed-vs-dp", ok, detail)


def series_suite(tol: float = SERIES_TOL) -> SuiteResult:
    zs = np.round(np.arange(0.0, 0.3500001, 0.01), 10)
    worst = max(abs(tree_series(float(z), 1e-12).value - w_ratio(float(z))) for z in zs)
    return SuiteResult("series-vs-lambert", worst <= tol, f"max diff {worst:.3g} on z in [0, 0.35]")


def run_all(max_n: int = 10, trunc: int = 16, tol: float = 1e-9, fault: bool = False) -> List[SuiteResult]:
    if not 1 <= trunc <= MAX_TRUNC:
        raise ValueError(f"truncation must lie in 1..{MAX_TRUNC}")
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    suites: List[Callable[[], SuiteResult]] = [
        lambda: eigen_suite(max_n, trunc, fault),
        lambda: inverse_suite(max_n, trunc, fault),
        lambda: oracle_suite(max_n, tol),
        series_suite,
    ]
    return [s() for s in suites]


def all_passed(results: List[SuiteResult]) -> bool:
    return all(r.passed for r in results)
