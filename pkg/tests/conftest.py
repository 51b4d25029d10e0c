import numpy as np
import pytest


def random_hole_instance(rng, points=1000):
    """A random ``(Z, theta, a, b, alpha, rho, sigma)`` whose ``b`` is the smallest
    value making the hypothesis hold on the verification grid."""
    theta = float(rng.uniform(0.0, 0.95))
    alpha = float(rng.uniform(0.25, 4.0))
    a = float(rng.choice([0.0, 10 ** rng.uniform(-3, 2)]))
    rho = float(rng.uniform(0.05, 0.6))
    sigma = float(rng.uniform(rho + 0.05, 1.0))
    kind = rng.integers(4)
    if kind == 0:
        z0 = float(rng.uniform(0, 10))

        def Z(x):
            return np.full_like(x, z0)
    elif kind == 1:
        s0 = sigma + float(rng.uniform(1e-3, 0.5))
        amp, beta = float(10 ** rng.uniform(-2, 2)), float(rng.uniform(0, alpha))

        def Z(x):
            return amp * (s0 - x) ** -beta
    elif kind == 2:
        c = rng.normal(size=4)

        def Z(x):
            return np.abs(c[0] + c[1] * np.sin(7 * x + c[2]) + c[3] * x)
    else:
        knots = np.sort(rng.uniform(rho, sigma, 6))
        vals = np.cumsum(rng.exponential(size=6))

        def Z(x):
            return np.interp(x, knots, vals)
    x = np.linspace(rho, sigma, points)
    z = Z(x)
    ri, si = np.triu_indices(points, k=1)
    need = z[ri] - theta * z[si] - a * (x[si] - x[ri]) ** -alpha
    b = float(max(0.0, need.max()))
    return Z, theta, a, b, alpha, rho, sigma


@pytest.fixture
def hole_instance():
    return random_hole_instance


# acceptance reporting ----------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    label = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        # parametrized criteria pass only if every case passes
        if _CRITERIA.get(label) != "FAIL":
            _CRITERIA[label] = "PASS" if rep.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA):
        terminalreporter.write_line(f"{_CRITERIA[label]}  {label}")
