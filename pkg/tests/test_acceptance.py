"""Acceptance checks, one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly with
``python tests/test_acceptance.py``.  Each line carries the measured value,
the tolerance and the wall time against its budget.
"""

import io
import math
import time
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.special import lambertw
from scipy.stats import chi2_contingency

from finetti.harness import cli
from finetti.limits import (INV_E, finite_coefficient, lambert_w0, limit_coefficient, mu_ratio,
                            sufficient_condition, tree_series, w_ratio)
from finetti.markov import (NumericMode, derive_seed, m_exact, monte_carlo_m, simulate_counts,
                            simulate_set_lottery)
from finetti.params import InstanceParams, RatioParams, ScaledParams, instantiate, to_scaled
from finetti.spectral import closed_form_m, verify_eigen_residual, verify_inverse_identity

R, F = NumericMode.RATIONAL, NumericMode.FLOAT64
GOLDEN = Path(__file__).with_name("golden_study.csv")
# two-sided tail beyond 4 standard deviations
FOUR_SIGMA_P = math.erfc(4 / math.sqrt(2))

_capture = None


@pytest.fixture(autouse=True)
def _report_channel(capsys):
    global _capture
    _capture = capsys
    yield
    _capture = None


def report(n, title, ok, detail, elapsed, budget):
    in_time = elapsed < budget
    line = (f"[{'PASS' if ok and in_time else 'FAIL'}] {n:>2}. {title}: {detail}; "
            f"time {elapsed:.3f}s (budget {budget:g}s)")
    if _capture is not None:
        with _capture.disabled():
            print("\n" + line)
    else:
        print(line)
    assert ok, line
    assert in_time, line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def best_time(fn, repeat=5):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_01_constant_p_half_alpha_one():
    v = mu_ratio(0.5, 1.0)
    w = lambertw(INV_E).real
    exact = w / (1 + w)
    el = best_time(lambda: mu_ratio(0.5, 1.0))
    ok = abs(v - 0.2178) <= 5e-5 and abs(v - exact) <= 1e-15
    report(1, "mu(1/2, 1) = W(1/e)/(1+W(1/e))", ok,
           f"value {v!r}, |v-0.2178| = {abs(v - 0.2178):.2e} <= 5e-5, |v-scipy| = {abs(v - exact):.1e}",
           el, 1e-3)


def test_02_constant_p_half_alpha_half():
    v = mu_ratio(0.5, 0.5)
    w = lambertw(1.0).real
    exact = w / (1 + w)
    el = best_time(lambda: mu_ratio(0.5, 0.5))
    ok = abs(v - 0.3619) <= 5e-5 and abs(v - exact) <= 1e-15
    report(2, "mu(1/2, 1/2) = W(1)/(1+W(1))", ok,
           f"value {v!r}, |v-0.3619| = {abs(v - 0.3619):.2e} <= 5e-5, |v-scipy| = {abs(v - exact):.1e}",
           el, 1e-3)


def _oracle_equivalence():
    worst, rational_bad = 0.0, 0
    grid = (0.5, 1.0, 2.0)
    for N in range(1, 51):
        for pi in grid:
            for beta in grid:
                inst = instantiate(ScaledParams(pi, beta), N)
                worst = max(worst, abs(closed_form_m(inst) - m_exact(inst)))
                if N <= 20 and closed_form_m(inst, R) != m_exact(inst, R):
                    rational_bad += 1
    hand = (closed_form_m(InstanceParams.from_counts(1, 1, 1), R) == Fraction(1, 4)
            and closed_form_m(InstanceParams.from_counts(2, 2, 2), R) == Fraction(23, 72))
    return worst, rational_bad, hand


def test_03_oracle_equivalence():
    (worst, rational_bad, hand), el = timed(_oracle_equivalence)
    ok = worst <= 1e-9 and rational_bad == 0 and hand
    report(3, "closed form vs DP", ok,
           f"max float gap {worst:.2e} <= 1e-9 over N=1..50 x 9 (pi, beta); "
           f"rational mismatches N<=20: {rational_bad}; hand cases 1/4, 23/72: {'ok' if hand else 'wrong'}",
           el, 10)


def _spectral():
    rows = []
    for N in (1, 2, 3, 5, 10):
        rows.append((N, verify_eigen_residual(N, 16, R), verify_inverse_identity(N, 16, R),
                     verify_eigen_residual(N, 16, F), verify_inverse_identity(N, 16, F)))
    return rows


def test_04_spectral_identities():
    rows, el = timed(_spectral)
    rational_ok = all(r[1] == 0 and r[2] == 0 for r in rows)
    eig_f = max(r[3] for r in rows)
    inv_f = max(r[4] for r in rows)
    ok = rational_ok and eig_f <= 1e-9 and inv_f <= 1e-9
    per_n = ", ".join(f"N={r[0]}: {r[4]:.1e}" for r in rows)
    report(4, "eigen and inverse identities, truncation 16", ok,
           f"rational residuals all zero: {rational_ok}; float eigen max {eig_f:.1e} <= 1e-9; "
           f"float inverse max {inv_f:.1e} <= 1e-9 ({per_n})",
           el, 5)


def test_05_limit_convergence_condition_satisfied():
    p, alpha = 0.5, 1.5
    s = to_scaled(RatioParams(p, alpha))
    mu = mu_ratio(p, alpha)
    Ns = (128, 256, 512, 1024, 2048)

    def run():
        return [abs(m_exact(instantiate(s, N)) - mu) for N in Ns]

    errs, el = timed(run)
    ratios = [b / a for a, b in zip(errs, errs[1:])]
    ok = sufficient_condition(p, alpha) and all(r <= 0.75 for r in ratios)
    report(5, "abs_err decay at (p, alpha) = (1/2, 3/2)", ok,
           f"errors {', '.join(f'{e:.2e}' for e in errs)}; doubling ratios "
           f"{', '.join(f'{r:.3f}' for r in ratios)} <= 0.75",
           el, 60)


def test_06_condition_violating_convergence():
    p, alpha = 0.5, 0.75
    s = to_scaled(RatioParams(p, alpha))
    Ns = (256, 512, 1024, 2048, 4096, 8192)

    def run():
        return [m_exact(instantiate(s, N)) for N in Ns]

    ms, el = timed(run)
    diffs = [abs(b - a) for a, b in zip(ms, ms[1:])]
    violated = not sufficient_condition(p, alpha)
    ok = violated and all(b < a for a, b in zip(diffs, diffs[1:]))
    report(6, "convergence evidence at (p, alpha) = (1/2, 3/4)", ok,
           f"condition satisfied: {not violated}; |m_2N - m_N| for N=256..4096: "
           f"{', '.join(f'{d:.2e}' for d in diffs)} strictly decreasing",
           el, 120)


def _series_identity():
    worst_series = max(abs(tree_series(i / 100).value - w_ratio(i / 100)) for i in range(36))
    grid = np.concatenate((-INV_E + np.logspace(-6, math.log10(INV_E), 2000), np.logspace(-12, 6, 8000)))
    worst_resid = max(lambert_w0(float(z)).residual / max(1.0, abs(float(z))) for z in grid)
    return worst_series, worst_resid, grid.size


def test_07_series_identity():
    (ws, wr, n), el = timed(_series_identity)
    ok = ws <= 1e-10 and wr <= 1e-12
    report(7, "tree series vs W/(1+W) and Lambert residual", ok,
           f"series gap {ws:.1e} <= 1e-10 on z=0..0.35; residual/max(1,|z|) {wr:.1e} <= 1e-12 on {n} points",
           el, 1)


def _coefficients():
    Ns = [64 * 2 ** j for j in range(7)]
    worst = 0.0
    for k in range(1, 6):
        lim = limit_coefficient(k, 1.0, 2.0)
        errs = [abs(finite_coefficient(k, instantiate(ScaledParams(1.0, 2.0), N)) - lim) for N in Ns]
        worst = max(worst, max(b / a for a, b in zip(errs, errs[1:])))
    return worst


def test_08_coefficient_limit():
    worst, el = timed(_coefficients)
    report(8, "finite coefficients approach k^k/k! g^k", worst <= 0.6,
           f"worst doubling ratio {worst:.3f} <= 0.6 for k=1..5, N=64..4096", el, 5)


def _sample_counts(samples, size):
    return np.bincount(np.asarray(samples), minlength=size)


def _chi_square_same(a, b):
    table = np.array([a, b])
    table = table[:, table.sum(axis=0) > 0]
    # merge sparse bins into their neighbour so expected counts stay >= 5
    merged, acc = [], np.zeros(2, dtype=np.int64)
    for col in table.T:
        acc = acc + col
        if acc.sum() >= 10:
            merged.append(acc)
            acc = np.zeros(2, dtype=np.int64)
    if acc.sum():
        if merged:
            merged[-1] = merged[-1] + acc
        else:
            merged.append(acc)
    if len(merged) < 2:
        return 1.0
    return chi2_contingency(np.array(merged).T)[1]


def _monte_carlo():
    inst = instantiate(ScaledParams(1.0, 1.0), 100)
    est = monte_carlo_m(inst, 100_000, 2024)
    z = abs(est.mean - m_exact(inst)) / est.std_error
    pvals = []
    n = 100_000
    for N_half, T in ((5, 10), (3, 7), (1, 1)):
        chain = simulate_counts(InstanceParams.from_counts(N_half, N_half, T),
                                [derive_seed(31, i) for i in range(n)])
        sets = [simulate_set_lottery(N_half, T, derive_seed(37, i)) for i in range(n)]
        pvals.append(_chi_square_same(_sample_counts(chain, N_half + 1), _sample_counts(sets, N_half + 1)))
    return z, pvals


def test_09_monte_carlo_consistency():
    (z, pvals), el = timed(_monte_carlo)
    ok = z <= 4 and min(pvals) >= FOUR_SIGMA_P
    report(9, "Monte Carlo vs DP and set lottery vs chain", ok,
           f"|mc - dp| = {z:.2f} std errors <= 4; chi-squared p-values "
           f"{', '.join(f'{p:.3f}' for p in pvals)} >= {FOUR_SIGMA_P:.1e}",
           el, 60)


def _cli_contract(tmp):
    def call(argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.main(argv)
        return code, out.getvalue()

    argv = ["study", "--p-list", "0.5", "--alpha-list", "1", "--n-list", "2,4",
            "--method", "dp,closed,mc,limit", "--trials", "200", "--seed", "7"]
    c1, first = call(argv)
    c2, second = call(argv)
    golden = first == second == GOLDEN.read_text(encoding="utf-8") and c1 == c2 == 0
    codes = {
        0: call(["compute", "--pi", "1", "--beta", "1", "--N", "2"])[0],
        1: call(["verify", "--max-n", "3", "--trunc", "8", "--inject-fault"])[0],
        2: call(["verify", "--trunc", "33"])[0],
        3: call(argv[:7] + ["--out", str(tmp / "no" / "such" / "dir.csv")])[0],
    }
    return golden, codes


def test_10_csv_cli_golden(tmp_path):
    (golden, codes), el = timed(lambda: _cli_contract(tmp_path))
    ok = golden and all(k == v for k, v in codes.items())
    report(10, "golden CSV and exit codes", ok,
           f"byte-identical rerun and golden file: {golden}; exit codes expected/got "
           f"{', '.join(f'{k}/{v}' for k, v in codes.items())}",
           el, 5)


if __name__ == "__main__":
    import sys
    import tempfile

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_"):
            continue
        try:
            if name == "test_10_csv_cli_golden":
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
