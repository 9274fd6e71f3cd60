from fractions import Fraction

import pytest


def brute_force_distribution(N, S0, T):
    """Distribution of S(T) by enumerating every removal path with exact weights.

    Independent of the transition-step code; exponential in T, so keep T small.
    """
    dist = {}

    def walk(S, t, weight):
        if t == T:
            dist[S] = dist.get(S, Fraction(0)) + weight
            return
        if S > 0:
            walk(S - 1, t + 1, weight * Fraction(S, N + S))
        walk(S, t + 1, weight * Fraction(N, N + S))

    walk(S0, 0, Fraction(1))
    return dist


def brute_force_m(N, S0, T):
    return sum((w * Fraction(k, N + k) for k, w in brute_force_distribution(N, S0, T).items()),
               Fraction(0))


@pytest.fixture
def brute():
    return brute_force_distribution
