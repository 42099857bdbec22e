from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import weights
from localdt.errors import NonzeroConstantTerm, NotUnital
from localdt.motivic import L, ONE, MotivicWeight, plethystic_exp, power_pow
from localdt.multiseries import MultiSeries, multi_exp, multi_log, multi_power, weighted_degree

B = 4


def multiseries(bound: int = B, constant: MotivicWeight | None = None):
    monos = st.lists(st.integers(0, 2), min_size=bound, max_size=bound).map(tuple).filter(
        lambda m: 0 < weighted_degree(m) <= bound
    )
    body = st.dictionaries(monos, weights(max_terms=2, span=4, coeff=3), max_size=4)
    if constant is None:
        return body.map(lambda d: MultiSeries(d, bound))
    return body.map(lambda d: MultiSeries({**d, (0,) * bound: constant}, bound))


def test_weighted_degree():
    assert weighted_degree((2, 0, 1)) == 5
    assert weighted_degree(()) == 0


def test_truncation_by_weight():
    s1, s2 = MultiSeries.variable(1, ONE, 3), MultiSeries.variable(2, ONE, 3)
    prod = s1 * s2
    assert prod[(1, 1, 0)] == ONE
    assert (prod * s1 * s1).coeffs == {}
    assert MultiSeries.variable(5, ONE, 3).coeffs == {}


def test_exp_of_single_variable():
    g = multi_exp(MultiSeries.variable(1, ONE, B))
    assert all(g[(k, 0, 0, 0)] == ONE for k in range(B + 1))


def test_errors():
    with pytest.raises(NonzeroConstantTerm):
        multi_exp(MultiSeries.one(2))
    with pytest.raises(NotUnital):
        multi_log(MultiSeries.variable(1, ONE, 2))


def test_two_point_configuration_class():
    # unordered pairs of distinct points on A^1: [Sym^2 A^1] - [diagonal] = L^2 - L
    g = multi_power(MultiSeries.one(2) + MultiSeries.variable(1, ONE, 2), L)
    assert g[(2, 0)] == L * L - L


@given(multiseries())
def test_log_exp_round_trip(f):
    assert multi_log(multi_exp(f)) == f


@given(multiseries(constant=ONE))
def test_exp_log_round_trip(g):
    assert multi_exp(multi_log(g)) == g


@given(multiseries(), multiseries())
def test_exp_additive(f, g):
    assert multi_exp(f + g) == multi_exp(f) * multi_exp(g)


@given(multiseries())
def test_substitution_commutes_with_exp(f):
    # independent univariate product formula agrees after s_i := t^i
    assert multi_exp(f).specialize_variables() == plethystic_exp(f.specialize_variables())


@given(multiseries(constant=ONE), weights(max_terms=2, span=3, coeff=3))
def test_substitution_commutes_with_power(A, x):
    assert multi_power(A, x).specialize_variables() == power_pow(A.specialize_variables(), x)


@given(multiseries(), st.integers(1, 3))
def test_adams_multiplicative(f, k):
    g = f + MultiSeries.one(B)
    assert (g * g).adams(k) == g.adams(k) * g.adams(k)
