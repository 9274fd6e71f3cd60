import pytest
from hypothesis import given, strategies as st

from finetti.params import (DomainError, InstanceParams, RatioParams, ScaledParams,
                            instantiate, snapped_floor, to_ratio, to_scaled)


@pytest.mark.parametrize("p, alpha, pi, beta", [
    (0.5, 1.0, 1.0, 2.0),
    (0.5, 0.5, 1.0, 1.0),
    (2 / 3, 1.0, 2.0, 3.0),
])
def test_to_scaled_examples(p, alpha, pi, beta):
    s = to_scaled(RatioParams(p, alpha))
    assert s.pi == pytest.approx(pi, rel=1e-15)
    assert s.beta == pytest.approx(beta, rel=1e-15)


def test_to_ratio_examples():
    r = to_ratio(ScaledParams(1.0, 2.0))
    assert (r.p, r.alpha) == (0.5, 1.0)
    r0 = to_ratio(ScaledParams(0.0, 0.0))
    assert (r0.p, r0.alpha) == (0.0, 0.0)


def test_round_trip_example():
    r = to_ratio(to_scaled(RatioParams(0.3, 0.7)))
    assert r.p == pytest.approx(0.3, rel=1e-15)
    assert r.alpha == pytest.approx(0.7, rel=1e-15)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
def test_to_scaled_rejects_degenerate_p(p):
    with pytest.raises(DomainError):
        to_scaled(_raw_ratio(p, 1.0))


def _raw_ratio(p, alpha):
    # bypass constructor validation to reach to_scaled's own check
    r = object.__new__(RatioParams)
    object.__setattr__(r, "p", p)
    object.__setattr__(r, "alpha", alpha)
    return r


def test_constructors_validate():
    with pytest.raises(DomainError):
        RatioParams(1.0, 0.5)
    with pytest.raises(DomainError):
        RatioParams(0.5, -1.0)
    with pytest.raises(DomainError):
        ScaledParams(-0.1, 1.0)


@pytest.mark.parametrize("pi, beta, N, S0, T", [
    (0.35, 1.0, 10, 3, 10),
    (1.0, 2.0, 1000, 1000, 2000),
    (0.999, 0.5, 3, 2, 1),
])
def test_instantiate_examples(pi, beta, N, S0, T):
    inst = instantiate(ScaledParams(pi, beta), N)
    assert (inst.S0, inst.T) == (S0, T)


def test_instantiate_snaps_float_misfires():
    # 0.1 * 30 == 3.0000000000000004, 0.7 * 10 == 7.000000000000001
    assert instantiate(ScaledParams(0.1, 0.7), 30).S0 == 3
    assert instantiate(ScaledParams(0.1, 0.7), 10).T == 7
    assert snapped_floor(2.9999999999) == 3
    assert snapped_floor(2.99) == 2


def test_instantiate_rejects_bad_N():
    with pytest.raises(DomainError):
        instantiate(ScaledParams(1.0, 1.0), 0)


def test_instantiate_overflow():
    with pytest.raises(OverflowError):
        instantiate(ScaledParams(1e300, 1.0), 10**10)


ratios = st.builds(RatioParams,
                   st.floats(min_value=1e-6, max_value=1 - 1e-6),
                   st.floats(min_value=0.0, max_value=1e3))


@given(ratios)
def test_ratio_round_trip(r):
    back = to_ratio(to_scaled(r))
    assert back.p == pytest.approx(r.p, rel=1e-14)
    assert back.alpha == pytest.approx(r.alpha, rel=1e-14, abs=0.0)


# 1 - p loses ~pi * eps relative precision, so the bound only holds for moderate pi
@given(st.floats(min_value=1e-6, max_value=20.0), st.floats(min_value=0.0, max_value=1e6))
def test_scaled_round_trip(pi, beta):
    s = to_scaled(to_ratio(ScaledParams(pi, beta)))
    assert s.pi == pytest.approx(pi, rel=1e-14)
    assert s.beta == pytest.approx(beta, rel=1e-14)


@given(st.floats(min_value=1e-3, max_value=1 - 1e-3), st.integers(min_value=1, max_value=10**6))
def test_initial_density_never_exceeds_nominal(p, N):
    inst = instantiate(to_scaled(RatioParams(p, 1.0)), N)
    pi = p / (1 - p)
    assert inst.initial_density <= p * (1 + 1e-12)
    if inst.S0 == pi * N:
        assert inst.initial_density == pytest.approx(p, rel=1e-12)


def test_from_counts():
    inst = InstanceParams.from_counts(2, 2, 4)
    assert (inst.N, inst.S0, inst.T, inst.pi, inst.beta) == (2, 2, 4, 1.0, 2.0)
