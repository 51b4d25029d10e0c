import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orliczbound.sobolev import (
    PreconditionError,
    h_n,
    integral_profile,
    conjugate_gap_constant,
    lift_global_bound,
    regularize_near_zero,
    sobolev_conjugate,
    power_floor_constant,
)
from orliczbound.young import (
    YoungFunctionError, check_dominates, conjugate, delta2_index, inverse, power, power_log,
)

BASKET = [power(1.5), power(2), power(3), power_log(2, 1)]


def _slope(f, lo=10.0, hi=1e4):
    t = np.logspace(math.log10(lo), math.log10(hi), 60)
    return np.polyfit(np.log(t), np.log(f(t)), 1)[0]


# integral profile ------------------------------------------------------------

@pytest.mark.parametrize("p,m,expected", [(2, 0.5, "diverges"), (2, 1.0, "diverges"),
                                          (4, 1.0, "converges")])
def test_profile_at_infinity(p, m, expected):
    assert integral_profile(power(p), m).at_infinity == expected


def test_profile_partial_values_nondecreasing():
    prof = integral_profile(power(2), 0.5)
    assert np.all(np.diff(prof.partial_values[:, 2]) >= 0)


def test_profile_rejects_nonpositive_m():
    with pytest.raises(YoungFunctionError):
        integral_profile(power(2), 0.0)


# H_n -------------------------------------------------------------------------

@pytest.mark.parametrize("s,expected", [(1.0, 2 ** (2 / 3)), (8.0, 2 * 2 ** (2 / 3)), (0.0, 0.0)])
def test_h_n_closed_form(s, expected):
    assert h_n(power(2), 3, s) == pytest.approx(expected, rel=1e-8, abs=1e-300)


def test_h_n_requires_convergence_at_zero():
    # (t / t^3)^(1/2) = 1/t is not integrable at 0
    with pytest.raises(PreconditionError, match="regularize"):
        h_n(power(3), 3, 1.0)


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_h_inverse_round_trip(s):
    sc = sobolev_conjugate(power(2), 3)
    assert sc.h_inverse(sc.h_of(s)) == pytest.approx(s, rel=1e-6)


def test_h_table_strictly_increasing():
    sc = sobolev_conjugate(power(1.5), 3)
    assert np.all(np.diff(sc.h) > 0)


# the conjugate ---------------------------------------------------------------

@pytest.mark.parametrize("n,p", [(3, 1.5), (3, 2), (4, 2), (4, 3)])
def test_power_slopes(n, p):
    assert _slope(sobolev_conjugate(power(p), n)) == pytest.approx(n * p / (n - p), abs=1e-3)


def test_lower_dimension_slope():
    assert _slope(sobolev_conjugate(power(1.5), 2)) == pytest.approx(6.0, abs=1e-3)


def test_point_value_at_h_of_one():
    assert sobolev_conjugate(power(2), 3)(2 ** (2 / 3)) == pytest.approx(1.0, rel=1e-6)


def test_result_is_convex_table():
    res = sobolev_conjugate(power(2), 3).result
    t = np.logspace(-3, 3, 200)
    d = res.derivative(t)
    assert np.all(np.diff(d) >= -1e-9 * d[1:])


# regularization --------------------------------------------------------------

@pytest.mark.parametrize("t,expected", [(0.5, 0.5), (2.0, 8.0)])
def test_regularize_splice(t, expected):
    assert regularize_near_zero(power(3), 3, t1=1.0)(t) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("A", BASKET, ids=repr)
def test_regularized_dominates_and_converges(A):
    Ah = regularize_near_zero(A, 3)
    t = np.logspace(-4, 4, 200)
    assert np.all(Ah(t) >= A(t) * (1 - 1e-14))
    assert integral_profile(Ah, 0.5).at_zero == "converges"
    assert integral_profile(Ah, 1.0).at_zero == "converges"


def test_regularize_degenerate():
    from orliczbound.young import piecewise_table
    with pytest.raises(YoungFunctionError):
        regularize_near_zero(piecewise_table([[2.0, 0.0, 0.0], [3.0, 1.0, 1.0]]), 3, t1=1.0)


@pytest.mark.parametrize("A,n", [(power(3), 3), (power(2), 2), (power_log(2, 1), 3)], ids=str)
def test_power_floor_constant_found(A, n):
    c = power_floor_constant(regularize_near_zero(A, n), n)
    assert c is not None and c <= 2 ** 40


# Lemma-style realizations ----------------------------------------------------

@pytest.mark.parametrize("A", BASKET, ids=repr)
@pytest.mark.parametrize("k", [0.25, 1.0, 4.0])
def test_young_below_conjugate_plus_constant(A, k):
    Ah = regularize_near_zero(A, 3)
    An = sobolev_conjugate(Ah, 3).result
    c, interior = conjugate_gap_constant(Ah, An, k)
    assert math.isfinite(c) and interior
    t = np.logspace(-6, 6, 500)
    assert np.all(Ah(t) <= An(k * t) + c + 1e-9 * Ah(t))


@pytest.mark.parametrize("A", BASKET, ids=repr)
def test_inverse_product_bound(A):
    n = 3
    Ah = regularize_near_zero(A, n)
    An = sobolev_conjugate(Ah, n).result
    t = np.logspace(-2, 6, 200)
    lhs = 1.0 / (inverse(conjugate(Ah), t) * inverse(An, t))
    assert np.all(lhs <= t ** (-(n - 1) / n) * (1 + 1e-6))


# global lift -----------------------------------------------------------------

def test_lift_makes_bound_global():
    target = sobolev_conjugate(power(1.5), 2).result
    cert = check_dominates(target, power(2.5), "near_infinity")
    lifted = lift_global_bound(power(2.5), target, L=cert.c, t0=cert.t0)
    assert lifted.certificate is not None
    t = np.logspace(-6, 8, 4000)
    bhat = lifted.function
    assert np.all(bhat(t) <= target(lifted.L_hat * t) * (1 + 1e-12))
    assert math.isfinite(delta2_index(bhat, 0.0))


def test_lift_is_explicit_splice():
    target = power(3)
    lifted = lift_global_bound(power(2), target, L=1.0, t0=1.0)
    bhat = lifted.function
    t = np.array([0.1, 0.5, lifted.t2 * 0.99, lifted.t3 * 1.01, 100.0])
    expect = np.where(t < lifted.t2, target(t), np.where(t >= lifted.t3, power(2)(t), np.nan))
    ok = ~np.isnan(expect)
    assert np.allclose(bhat(t)[ok], expect[ok], rtol=1e-9)


def test_lift_without_certificate():
    with pytest.raises(PreconditionError):
        lift_global_bound(power(4), power(2), L=1.0, t0=1.0)
