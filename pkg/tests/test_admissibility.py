import json

import pytest

from orliczbound.admissibility import (
    ADMISSIBLE,
    BOUNDARY,
    NOT_ADMISSIBLE,
    SUBCRITICAL,
    SUPERCRITICAL,
    TRIVIAL,
    GrowthSpec,
    analyze,
    classify_regime,
    doubling_index,
    power_log_thresholds,
)
from orliczbound.young import YoungFunctionError, exp_poly, power, power_log, scaled


def _threshold(n, p):
    return (n - 1) * p / ((n - 1) - p)


@pytest.mark.parametrize("A,n,expected", [
    (power(1.5), 2, SUPERCRITICAL),
    (power(3), 2, TRIVIAL),
    (power(1.5), 3, SUBCRITICAL),
    (power(2.5), 3, SUPERCRITICAL),
    (power(4), 3, TRIVIAL),
    (power(2), 4, SUBCRITICAL),
])
def test_classify_regime(A, n, expected):
    assert classify_regime(A, n) == expected


def test_example_threshold_admissible():
    v = analyze(GrowthSpec(power(1.5), power(6), 3))
    assert v.outcome == ADMISSIBLE and v.b_check is not None and v.exit_code == 0


def test_example_just_above_threshold():
    v = analyze(GrowthSpec(power(1.5), power(6.05), 3))
    assert v.outcome == NOT_ADMISSIBLE and v.b_check is None
    assert v.diagnostics["b_witness"]["slope_gap"] > 0


def test_example_e_check():
    v = analyze(GrowthSpec(power(1.5), power(2), 3, E=power(3)))
    assert v.admissible and v.e_check is not None


def test_e_above_threshold_rejected():
    v = analyze(GrowthSpec(power(1.5), power(2), 3, E=power(3.5)))
    assert v.outcome == NOT_ADMISSIBLE and v.e_check is None


def test_non_doubling_b_rejected():
    v = analyze(GrowthSpec(power(2.5), exp_poly(1.0), 3))
    assert v.outcome == NOT_ADMISSIBLE


@pytest.mark.parametrize("q", [6.01, 6.04])
def test_near_threshold_is_boundary(q):
    v = analyze(GrowthSpec(power(1.5), power(q), 3))
    assert v.outcome == BOUNDARY and v.exit_code == 2


def test_trivially_bounded_outcome():
    v = analyze(GrowthSpec(power(4), power(9), 3))
    assert v.outcome == TRIVIAL and v.exit_code == 3


def test_supercritical_accepts_any_doubling_b():
    assert analyze(GrowthSpec(power(2.5), power(40), 3)).admissible


def test_verdict_serializes():
    v = analyze(GrowthSpec(power(1.5), power(6.5), 3))
    doc = json.loads(json.dumps(v.to_dict()))
    assert doc["outcome"] == NOT_ADMISSIBLE
    assert "b_witness" in doc["diagnostics"]
    assert "outcome: not_admissible" in v.summary()


@pytest.mark.parametrize("kw,field", [({"n": 1}, "n"), ({"L": 0.5}, "L"), ({"t0": -1.0}, "t0"),
                                      ({"Q": 0.9}, "Q")])
def test_spec_validation(kw, field):
    args = {"A": power(2), "B": power(2), "n": 3, **kw}
    with pytest.raises(YoungFunctionError) as err:
        GrowthSpec(**args)
    assert err.value.field == field


_TRIPLES = [(n, p, _threshold(n, p) + d)
            for n, p in [(3, 1.2), (3, 1.5), (4, 1.5), (4, 2), (4, 2.5),
                         (5, 2), (5, 3), (5, 1.5), (3, 1.8), (4, 1.2)]
            for d in (-0.5, 0.5)]


@pytest.mark.parametrize("n,p,q", _TRIPLES)
def test_power_law_cross_validation(n, p, q):
    v = analyze(GrowthSpec(power(p), power(q), n))
    assert v.admissible == (q < _threshold(n, p))


def test_monotone_in_b():
    A, B = power(1.5), power(5.5)
    assert analyze(GrowthSpec(A, B, 3)).admissible
    for smaller in (power(3), scaled(power(5.5), 1.0, 0.5), power(2)):
        assert analyze(GrowthSpec(A, smaller, 3)).admissible


# closed-form thresholds ------------------------------------------------------

def test_power_log_example():
    th = power_log_thresholds(3, 1.5, 1)
    assert (th.b_exponent, th.b_log_exponent) == (6.0, 4.0)
    assert th.regime == SUBCRITICAL


@pytest.mark.parametrize("n,p", [(3, 1.5), (4, 2), (5, 3), (4, 1.2)])
def test_alpha_zero_reduces_to_powers(n, p):
    th = power_log_thresholds(n, p, 0.0)
    assert th.b_exponent == _threshold(n, p)
    assert th.e_exponent == n * p / (n - p)
    assert th.b_log_exponent == 0 and th.e_log_exponent == 0


@pytest.mark.parametrize("alpha", [-2.0, 0.0, 3.0])
def test_any_b_regime(alpha):
    assert power_log_thresholds(3, 2, alpha).b_regime == "any_B"


@pytest.mark.parametrize("n,p,alpha,field", [(3, 0.5, 0, "p"), (3, 4, 0, "p"), (3, 1, -1, "alpha"),
                                             (3, 3, 2.5, "alpha"), (1, 1.5, 0, "n")])
def test_threshold_domain_errors(n, p, alpha, field):
    with pytest.raises(YoungFunctionError) as err:
        power_log_thresholds(n, p, alpha)
    assert err.value.field == field


@pytest.mark.parametrize("E,finite", [(power(3), True), (power_log(2, 1), True), (exp_poly(1.0), False)])
def test_doubling_index(E, finite):
    d = doubling_index(E, 1.0)
    assert (d < float("inf")) == finite
