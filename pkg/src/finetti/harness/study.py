"""Convergence-study records, grid runner and CSV serialization."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from ..limits import mu_ratio, mu_scaled, sufficient_condition
from ..markov import NumericMode, m_exact, monte_carlo_m
from ..params import (DomainError, RatioParams, ScaledParams, instantiate, to_ratio,
                      to_scaled)
from ..spectral import closed_form_m

METHODS = ("dp", "closed", "mc", "limit")
CSV_HEADER = ("p", "alpha", "pi", "beta", "N", "method", "value", "std_error",
              "mu_limit", "abs_err", "condition_satisfied")
DEFAULT_TRIALS = 10_000
DEFAULT_SEED = 0


@dataclass(frozen=True)
class StudyRecord:
    p: float
    alpha: float
    pi: float
    beta: float
    N: Optional[int]
    method: str
    value: float
    std_error: Optional[float]
    mu_limit: float
    abs_err: float
    condition_satisfied: bool

    def sort_key(self):
        return (self.p, self.alpha, -1 if self.N is None else self.N, self.method)

    def csv_fields(self) -> List[str]:
        return [fmt_float(self.p), fmt_float(self.alpha), fmt_float(self.pi),
                fmt_float(self.beta), "" if self.N is None else str(self.N), self.method,
                fmt_float(self.value),
                "" if self.std_error is None else fmt_float(self.std_error),
                fmt_float(self.mu_limit), fmt_float(self.abs_err),
                "true" if self.condition_satisfied else "false"]


@dataclass
class StudyConfig:
    p_list: Sequence[float]
    alpha_list: Sequence[float]
    n_list: Sequence[int]
    methods: Sequence[str] = ("dp",)
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    mode: NumericMode = NumericMode.FLOAT64
    out: Optional[str] = None
    svg: Optional[str] = None
    figure: Optional[str] = None
    jobs: int = 1

    def validate(self) -> None:
        if not self.p_list or not self.alpha_list or not self.n_list or not self.methods:
            raise DomainError("p, alpha, N and method lists must be non-empty")
        if any(n < 1 for n in self.n_list):
            raise DomainError("N values must be positive")
        for m in self.methods:
            if m not in METHODS:
                raise DomainError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
        for p in self.p_list:
            if not 0.0 < p < 1.0:
                raise DomainError(f"p must lie in (0, 1), got {p!r}")
        if any(not a >= 0.0 for a in self.alpha_list):
            raise DomainError("alpha values must be >= 0")
        if self.trials < 1:
            raise DomainError("trials must be >= 1")


def fmt_float(x: float) -> str:
    """Shortest round-trip representation (at most 17 significant digits)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def resolve_params(p=None, alpha=None, pi=None, beta=None):
    """Return ``(RatioParams, ScaledParams)`` from exactly one parameter pair."""
    ratio_given = p is not None or alpha is not None
    scaled_given = pi is not None or beta is not None
    if ratio_given and scaled_given:
        raise DomainError("give either (p, alpha) or (pi, beta), not both")
    if ratio_given:
        if p is None or alpha is None:
            raise DomainError("both p and alpha are required")
        r = RatioParams(p, alpha)
        return r, to_scaled(r)
    if pi is None or beta is None:
        raise DomainError("either (p, alpha) or (pi, beta) is required")
    s = ScaledParams(pi, beta)
    return to_ratio(s), s


def compute_record(r: RatioParams, s: ScaledParams, N: Optional[int], method: str,
                   mode: "NumericMode | str" = NumericMode.FLOAT64,
                   trials: int = DEFAULT_TRIALS, seed: int = DEFAULT_SEED) -> StudyRecord:
    """Evaluate one (parameters, N, method) cell."""
    mode = NumericMode.parse(mode)
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}")
    if 0.0 < r.p < 1.0:
        mu = mu_ratio(r.p, r.alpha)
        cond = sufficient_condition(r.p, r.alpha)
    else:
        mu = mu_scaled(s.pi, s.beta)
        cond = False
    std_error = None
    if method == "limit":
        value = mu
    else:
        if N is None:
            raise DomainError(f"method {method!r} needs N")
        inst = instantiate(s, N)
        if method == "dp":
            value = m_exact(inst, mode)
        elif method == "closed":
            value = closed_form_m(inst, mode)
        else:
            est = monte_carlo_m(inst, trials, seed)
            value, std_error = est.mean, est.std_error
    if isinstance(value, Fraction):
        value = float(value)
    return StudyRecord(r.p, r.alpha, s.pi, s.beta, N, method, value, std_error,
                       mu, abs(value - mu), cond)


def _cell(args) -> StudyRecord:
    p, alpha, N, method, mode, trials, seed = args
    r, s = resolve_params(p=p, alpha=alpha)
    return compute_record(r, s, N, method, mode, trials, seed)


def run_study(config: StudyConfig) -> List[StudyRecord]:
    """All grid cells, sorted by ``(p, alpha, N, method)``."""
    config.validate()
    cells = [(p, a, N, m, config.mode, config.trials, config.seed)
             for p in config.p_list for a in config.alpha_list
             for N in config.n_list for m in config.methods]
    # duplicate grid values would produce duplicate rows
    cells = sorted(set(cells), key=lambda c: (c[0], c[1], c[2], c[3]))
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as ex:
            records = list(ex.map(_cell, cells))
    else:
        records = [_cell(c) for c in cells]
    return sorted(records, key=StudyRecord.sort_key)


def write_csv(records: Iterable[StudyRecord], stream, header: bool = True) -> None:
    w = csv.writer(stream, lineterminator="\n")
    if header:
        w.writerow(CSV_HEADER)
    for rec in records:
        w.writerow(rec.csv_fields())


def records_to_csv(records: Iterable[StudyRecord], header: bool = True) -> str:
    buf = io.StringIO()
    write_csv(records, buf, header)
    return buf.getvalue()


def read_csv(text: str) -> List[dict]:
    return list(csv.DictReader(io.StringIO(text)))
