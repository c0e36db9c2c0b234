import cmath

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qclift.jets import (Jet, jet_eval_series, series_integrate,
                         series_multiply, series_value)

from conftest import fd_d1, fd_d2, fd_d3


def test_series_linear():
    j = jet_eval_series([0, 1], 0.3 + 0j)
    assert j.f == 0.3 + 0j
    assert j.d1 == 1.0
    assert j.d2 == 0.0
    assert j.d3 == 0.0


def test_series_constant():
    j = jet_eval_series([1], 0.4 + 0.2j)
    assert (j.f, j.d1, j.d2, j.d3) == (1.0, 0.0, 0.0, 0.0)


def test_series_inverse_square_truncation():
    # (1-z)^{-2} = sum (k+1) z^k, truncated at degree 40
    coeffs = [k + 1 for k in range(41)]
    j = jet_eval_series(coeffs, 0.2 + 0j)
    assert abs(j.f - 1.5625) < 1e-10
    assert abs(j.d1 - 3.90625) < 1e-9


def test_empty_series_rejected():
    with pytest.raises(ValueError):
        jet_eval_series([], 0.1)


coeff = st.complex_numbers(min_magnitude=0.0, max_magnitude=2.0,
                           allow_nan=False, allow_infinity=False)
small_z = st.complex_numbers(min_magnitude=0.0, max_magnitude=0.4,
                             allow_nan=False, allow_infinity=False)


def _series_fn(coeffs):
    return lambda z: series_value(coeffs, z)


@settings(max_examples=40, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=5),
       st.lists(coeff, min_size=2, max_size=5), small_z)
def test_product_rule_matches_fd(ca, cb, z):
    prod = jet_eval_series(ca, z) * jet_eval_series(cb, z)
    f = lambda w: series_value(ca, w) * series_value(cb, w)
    assert abs(prod.d1 - fd_d1(f, z)) <= 1e-6 * (1 + abs(prod.d1))
    assert abs(prod.d2 - fd_d2(f, z)) <= 1e-6 * (1 + abs(prod.d2))
    assert abs(prod.d3 - fd_d3(f, z)) <= 1e-6 * (1 + abs(prod.d3))


@settings(max_examples=40, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=4), small_z)
def test_quotient_rule_matches_fd(ca, z):
    cb = [2.5, 0.3, -0.2]   # denominator bounded away from zero on |z|<0.4
    quot = jet_eval_series(ca, z) / jet_eval_series(cb, z)
    f = lambda w: series_value(ca, w) / series_value(cb, w)
    assert abs(quot.d1 - fd_d1(f, z)) <= 1e-6 * (1 + abs(quot.d1))
    assert abs(quot.d2 - fd_d2(f, z)) <= 1e-6 * (1 + abs(quot.d2))
    assert abs(quot.d3 - fd_d3(f, z)) <= 1e-6 * (1 + abs(quot.d3))


@settings(max_examples=40, deadline=None)
@given(st.lists(coeff, min_size=2, max_size=4),
       st.lists(coeff, min_size=2, max_size=4), small_z)
def test_composition_matches_fd(ca, cb, z):
    inner = jet_eval_series(cb, z)
    outer = jet_eval_series(ca, inner.f)
    comp = outer.compose(inner)
    f = lambda w: series_value(ca, series_value(cb, w))
    assert abs(comp.d1 - fd_d1(f, z)) <= 1e-6 * (1 + abs(comp.d1))
    assert abs(comp.d2 - fd_d2(f, z)) <= 1e-6 * (1 + abs(comp.d2))
    assert abs(comp.d3 - fd_d3(f, z)) <= 1e-6 * (1 + abs(comp.d3))


@pytest.mark.parametrize("name,jet_op,fn", [
    ("exp", lambda j: j.exp(), cmath.exp),
    ("log", lambda j: j.log(), cmath.log),
    ("sqrt", lambda j: j.sqrt(), cmath.sqrt),
    ("pow", lambda j: j.pow(1.7), lambda w: w ** 1.7),
])
def test_analytic_functions_match_fd(name, jet_op, fn):
    coeffs = [2.0, 0.4, -0.15, 0.05]   # stays in the right half plane
    for z in (0.1 + 0.2j, -0.3 + 0.05j, 0.25 - 0.3j):
        j = jet_op(jet_eval_series(coeffs, z))
        f = lambda w: fn(series_value(coeffs, w))
        assert abs(j.f - f(z)) < 1e-12
        assert abs(j.d1 - fd_d1(f, z)) <= 1e-6 * (1 + abs(j.d1))
        assert abs(j.d2 - fd_d2(f, z)) <= 1e-6 * (1 + abs(j.d2))
        assert abs(j.d3 - fd_d3(f, z)) <= 1e-6 * (1 + abs(j.d3))


def test_reciprocal_exact_on_geometric_series():
    # 1/(1-z) has all derivatives k!/(1-z)^{k+1}
    z = 0.3 + 0.1j
    j = (1.0 - Jet.variable(z)).reciprocal()
    w = 1.0 / (1.0 - z)
    assert abs(j.f - w) < 1e-14
    assert abs(j.d1 - w ** 2) < 1e-14
    assert abs(j.d2 - 2 * w ** 3) < 1e-13
    assert abs(j.d3 - 6 * w ** 4) < 1e-13


def test_series_helpers():
    prod = series_multiply([1, 1], [1, -1])
    assert prod == [1, 0, -1]
    integ = series_integrate([1, 2, 3])
    assert integ == [0, 1, 1, 1]
    assert series_value([1, 2], 2.0) == 5.0
