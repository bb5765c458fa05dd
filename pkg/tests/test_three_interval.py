"""The discrete three-interval lemma and its growth factor."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactlab.decay import IntervalSeq, gamma_of_c, growth_factor, three_interval_bound
from contactlab.errors import OutOfRange


def test_growth_factor_value():
    # (1 + sqrt(1 - 0.64)) / 0.8 = 1.6 / 0.8
    assert abs(growth_factor(0.4) - 2.0) < 1e-14


def test_growth_factor_limit_at_half():
    assert abs(growth_factor(0.5 - 1e-9) - 1.0) < 1e-4


def test_growth_factor_range_checks():
    for bad in (0.0, 0.5, 0.7, -0.1):
        with pytest.raises(OutOfRange):
            growth_factor(bad)
    with pytest.raises(OutOfRange):
        gamma_of_c(0.0)


def test_exponential_identity():
    # gamma(c) = 1/(e^c + e^-c) turns the factor into e^c
    assert abs(gamma_of_c(1.0) - 1.0 / (np.e + 1.0 / np.e)) < 1e-15
    for c in np.linspace(0.01, 5.0, 100):
        assert abs(growth_factor(gamma_of_c(c)) - np.exp(c)) < 1e-12


def test_exponential_sequence_is_extremal():
    c = 0.9
    gamma = gamma_of_c(c)
    x = np.exp(-c * np.arange(41))
    # the hypothesis holds with equality by construction of gamma(c)
    interior = x[1:-1]
    assert np.max(np.abs(interior - gamma * (x[:-2] + x[2:]))) < 1e-15
    rep = three_interval_bound(IntervalSeq(x, gamma))
    assert rep.hypothesis_holds and rep.bound_holds


def test_violations_reported():
    rep = three_interval_bound(IntervalSeq([1.0, 1.0, 1.0], 0.4))
    assert not rep.hypothesis_holds
    assert list(rep.violations) == [1]  # 1 > 0.4 * (1 + 1)


def test_two_sided_geometric_mixtures():
    g = np.random.Generator(np.random.Philox(42))
    N = 30
    k = np.arange(N + 1, dtype=float)
    for _ in range(200):
        gamma = g.uniform(0.05, 0.49)
        xi = growth_factor(gamma)
        a, b = g.uniform(0, 5, 2)
        x = a * xi**-k + b * xi ** (k - N)
        rep = three_interval_bound(IntervalSeq(x, gamma))
        assert rep.hypothesis_holds
        assert rep.bound_holds


def ratio_random_sequence(g, N, gamma):
    """Exact hypothesis-satisfying sample via the ratio recursion.

    With r_k = x_k / x_{k-1} the hypothesis reads gamma (1/r_k + r_{k+1}) >= 1,
    so choosing r_{k+1} = 1/gamma - 1/r_k + u with u >= 0 realizes every
    admissible sequence; u = 0 stretches are the equality (extremal) case.
    """
    xi = growth_factor(gamma)
    r = g.uniform(1.0 / xi, xi)
    x = [1.0]
    for _ in range(N):
        u = g.exponential(0.5) if g.uniform() < 0.7 else 0.0
        x.append(x[-1] * r)
        r = 1.0 / gamma - 1.0 / r + u
    x = np.array(x)
    return x / np.max(x)


def test_ratio_random_sequences():
    g = np.random.Generator(np.random.Philox(7))
    for _ in range(300):
        N = int(g.integers(3, 51))
        gamma = g.uniform(0.05, 0.49)
        x = ratio_random_sequence(g, N, gamma)
        rep = three_interval_bound(IntervalSeq(x, gamma))
        assert rep.hypothesis_holds
        assert rep.bound_holds


def test_bounded_infinite_sequence_tail_bound():
    # windowed application on a long bounded sequence: the second endpoint
    # term dies off, leaving x_k <= x_0 e^{-ck}
    c = 0.6
    gamma = gamma_of_c(c)
    K = 200
    x = np.exp(-c * np.arange(K + 1))  # bounded, hypothesis-satisfying
    rep = three_interval_bound(IntervalSeq(x, gamma))
    assert rep.bound_holds
    ks = np.arange(K // 2 + 1)
    assert np.all(x[: K // 2 + 1] <= x[0] * np.exp(-c * ks) + 1e-12)


def test_negative_entries_rejected():
    with pytest.raises(OutOfRange):
        IntervalSeq([1.0, -0.1, 0.5], 0.3)


@settings(max_examples=50, deadline=None)
@given(
    st.integers(min_value=3, max_value=40),
    st.floats(min_value=0.05, max_value=0.49),
    st.integers(min_value=0, max_value=2**31 - 1),
)
def test_bound_property(N, gamma, seed):
    g = np.random.Generator(np.random.Philox(seed))
    x = ratio_random_sequence(g, N, gamma)
    rep = three_interval_bound(IntervalSeq(x, gamma))
    assert rep.hypothesis_holds
    assert rep.bound_holds
