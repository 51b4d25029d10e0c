import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orliczbound._expr import ExpressionError, compile_expression
from orliczbound.harness import (
    SWEEP_COLUMNS,
    TIE_ULPS,
    EnvelopeError,
    FunctionalSpec,
    boundedness_sweep,
    convexity_defect,
    discretize,
    interior_sup,
    minimize,
    problem_from_config,
    quasi_min_check,
    write_sweep_csv,
)
from orliczbound.young import YoungFunctionError, power, power_log


def _dirichlet(boundary="x1", A=power(2), cells=16, n=2, **kw):
    return discretize(FunctionalSpec(A, A, boundary=boundary, **kw), n, cells)


# discretization --------------------------------------------------------------

def test_zero_boundary_gives_zero():
    P = _dirichlet(0.0)
    res = minimize(P)
    assert np.max(np.abs(res.values)) <= 1e-6
    assert res.energy == pytest.approx(0.0, abs=1e-12)


def test_zero_field_energy_with_e_term():
    P = discretize(FunctionalSpec(power(2), power(2), E=power(3), e_coef=2.0), 2, 8)
    assert P.energy(np.zeros(P.vertices.shape[0])) == 0.0


@pytest.mark.parametrize("n,cells", [(2, 16), (3, 8)])
def test_linear_boundary_reproduced(n, cells):
    P = _dirichlet("x1", cells=cells, n=n)
    res = minimize(P, tol=1e-14)
    assert np.max(np.abs(res.values - P.vertices[:, 0])) <= 1e-8


def test_power4_trace_monotone():
    P = _dirichlet("x1 + 0.3 * x2 ** 2", A=power(4))
    res = minimize(P, max_iters=3000)
    tr = np.array(res.energy_trace)
    # nonincreasing up to the rounding band in which energies count as tied
    assert np.all(np.diff(tr) <= TIE_ULPS * np.spacing(tr[:-1]))
    assert tr[-1] < tr[0]


@pytest.mark.parametrize("kw", [{"cells": 4}, {"lo": 1.0, "hi": 1.0}, {"n": 0}])
def test_degenerate_grid(kw):
    args = {"n": 2, "cells": 16, **kw}
    with pytest.raises(ValueError):
        discretize(FunctionalSpec(power(2), power(2)), **args)


def test_theta_range_enforced():
    with pytest.raises(ValueError, match="theta"):
        discretize(FunctionalSpec(power(2), power(3), theta="x1 + 1"), 2, 8)


def test_structure_mode_validated():
    with pytest.raises(YoungFunctionError):
        FunctionalSpec(power(2), power(2), structure_mode="whatever")


def test_energy_gradient_matches_differences():
    P = discretize(FunctionalSpec(power(2), power(3.5), theta="where(x1 < 0, 1.0, 0.3)",
                                  E=power(2), e_coef=0.5, boundary="sin(x1)"), 2, 8)
    rng = np.random.default_rng(3)
    u = P.full(rng.normal(size=int(P.interior.sum())))
    g = P.energy_gradient(u)
    h = 1e-6
    for i in rng.choice(np.flatnonzero(P.interior), 10, replace=False):
        e = np.zeros_like(u)
        e[i] = h
        fd = (P.energy(u + e) - P.energy(u - e)) / (2 * h)
        assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-8)


# checks ----------------------------------------------------------------------

@pytest.fixture(scope="module")
def solved():
    P = _dirichlet("x1")
    return P, minimize(P, tol=1e-14)


def test_quasi_min_holds(solved):
    P, res = solved
    out = quasi_min_check(P, res.values, trials=100)
    assert out["violations"] == 0 and out["worst_ratio"] <= 1 + 1e-6


def test_quasi_min_detects_non_minimizer(solved):
    P, res = solved
    bad = res.values.copy()
    bad[P.interior] += np.random.default_rng(0).normal(size=int(P.interior.sum()))
    assert quasi_min_check(P, bad, trials=50, amplitude=1e-3)["violations"] > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 1))
def test_convexity_defect_nonnegative(seed, lam):
    P = discretize(FunctionalSpec(power(1.5), power(4), theta="where(x2 > 0, 1.0, 0.0)"), 2, 8)
    rng = np.random.default_rng(seed)
    u, v = rng.normal(size=(2, P.vertices.shape[0]))
    assert convexity_defect(P, u, v, lam) >= -1e-9 * (1 + P.energy(u) + P.energy(v))


def test_envelope_within_L(solved):
    P, res = solved
    assert P.envelope_check(res.values) == 0.0


def test_envelope_violation():
    P = discretize(FunctionalSpec(power(2), power(2), L=1.0), 2, 8)
    # f = A when theta = 1, so A - f = 0; swap roles to force a gap
    P.spec.B = power(1.5)
    u = 3.0 * P.vertices[:, 0]
    with pytest.raises(EnvelopeError):
        P.envelope_check(u)


def test_interior_sup_linear(solved):
    P, res = solved
    assert interior_sup(P, res.values) == pytest.approx(0.5, abs=1e-8)


# sweep -----------------------------------------------------------------------

def test_sweep_equal_growth_is_stable():
    rows = boundedness_sweep(2, [2], [2], refinements=(0, 1, 2))
    sups = [r["interior_sup"] for r in rows]
    assert all(r["verdict"] == "admissible" for r in rows)
    assert (max(sups) - min(sups)) / max(sups) <= 0.05


def test_sweep_rows_and_csv(tmp_path):
    rows = boundedness_sweep(2, [2], [6], refinements=(0,), max_iters=500)
    assert set(rows[0]) == set(SWEEP_COLUMNS)
    path = write_sweep_csv(rows, tmp_path / "s.csv", {"n": 2})
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# ") and json.loads(lines[0][2:]) == {"n": 2}
    assert lines[1] == ",".join(SWEEP_COLUMNS)


@pytest.mark.parametrize("n,p,q,expected", [(3, 1.5, 6, "admissible"), (3, 1.5, 7, "not_admissible")])
def test_sweep_verdict_column(n, p, q, expected):
    rows = boundedness_sweep(n, [p], [q], refinements=(0,), max_iters=50)
    assert rows[0]["verdict"] == expected


# configuration ---------------------------------------------------------------

def test_config_round_trip():
    cfg = {"n": 2, "cells": 8, "A": "power:2", "B": {"kind": "power", "p": 3},
           "theta": "where(x1 < 0, 1.0, 0.0)", "boundary": "x1", "solver": {"tol": 1e-10}}
    P, solver = problem_from_config(cfg)
    assert P.cells == 8 and solver["tol"] == 1e-10 and solver["max_iters"] == 20000


@pytest.mark.parametrize("cfg,field", [
    ({"A": "power:2", "bogus": 1}, "$"),
    ({"B": "power:2"}, "$.A"),
    ({"A": "power:0.5"}, "$.A"),
    ({"A": "power:2", "B": {"kind": "power"}}, "$.B.p"),
])
def test_config_errors_name_field(cfg, field):
    with pytest.raises(YoungFunctionError) as err:
        problem_from_config(cfg)
    assert err.value.field == field


def test_config_power_log_accepted():
    P, _ = problem_from_config({"A": power_log(2, 1).to_dict(), "cells": 8})
    assert P.spec.A(10.0) == pytest.approx(power_log(2, 1)(10.0))


# expressions -----------------------------------------------------------------

@pytest.mark.parametrize("src,expected", [("x1 + 2 * x2", 0.5 + 2 * -1.0), ("y", -1.0),
                                          ("where(x < 1, sin(pi * x), 0)", 1.0),
                                          ("hypot(x1, x2) ** 2", 1.25), ("3", 3.0)])
def test_expression_values(src, expected):
    f = compile_expression(src, 2)
    assert f(np.array([[0.5, -1.0]]))[0] == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("src", ["__import__('os')", "x1.real", "[x1]", "x3", "foo(x1)",
                                 "x1 if x2 else 0", "'a'", "lambda: 1", "x1 +"])
def test_expression_rejected(src):
    with pytest.raises(ExpressionError):
        compile_expression(src, 2)
