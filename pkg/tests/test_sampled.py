import math

import numpy as np
import pytest

from orliczbound.sampled import (
    GridError,
    SampledFunction,
    cartesian_grid,
    load_csv,
    radial_grid,
    sample,
    save_csv,
    scattered_grid,
    sphere_area,
    unit_ball_volume,
)
from orliczbound.seeds import BASKET, sample_seed, seed_names


@pytest.mark.parametrize("n,expected", [(2, math.pi), (3, 4 * math.pi / 3)])
def test_ball_volume(n, expected):
    assert unit_ball_volume(n) == pytest.approx(expected, rel=1e-15)
    assert sphere_area(n) == pytest.approx(n * expected, rel=1e-15)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("radius,shells", [(1.0, 16), (0.5, 64)])
def test_radial_weights_sum_to_volume(n, radius, shells):
    g = radial_grid(n, radius, shells)
    assert g.measure == pytest.approx(unit_ball_volume(n) * radius ** n, rel=1e-9)


def test_cartesian_weights_sum_to_volume():
    g = cartesian_grid(3, -1.0, 2.0, 10)
    assert g.measure == pytest.approx(27.0, rel=1e-12)


def test_radial_grid_dimension_limit():
    with pytest.raises(GridError):
        radial_grid(4, 1.0, 8)


def test_scattered_rejects_bad_weights():
    with pytest.raises(GridError):
        scattered_grid([[0.0], [1.0]], [1.0, -1.0])


def test_value_count_checked():
    with pytest.raises(GridError):
        SampledFunction(cartesian_grid(1, 0, 1, 4), [1.0, 2.0])


def test_polynomial_integrated_exactly_on_ball():
    # int_{B_1} |x|^2 dx = area * 1/(n+2)
    for n in (2, 3):
        g = radial_grid(n, 1.0, 200)
        u = sample(g, lambda x: np.sum(x ** 2, axis=1))
        assert u.integral() == pytest.approx(sphere_area(n) / (n + 2), rel=1e-4)


def _fd_error(seed, n, shells):
    # fine angular rule so the radial spacing controls the error
    g = radial_grid(n, 1.0, shells, order=24)
    exact = sample_seed(seed, g)
    fd = SampledFunction(g, exact.values)
    inner = np.linalg.norm(g.points, axis=1) < 0.9
    return np.max(np.abs(fd.gradient - exact.gradient)[inner])


@pytest.mark.parametrize("seed", ["bowl", "bump", "wave", "offset_bump"])
@pytest.mark.parametrize("n", [2, 3])
def test_fd_gradient_second_order(seed, n):
    e1, e2 = _fd_error(seed, n, 32), _fd_error(seed, n, 64)
    # exact when the radial profile is quadratic
    assert e2 <= max(e1 / 3.0, 1e-9)


def test_cartesian_fd_gradient_second_order():
    errs = []
    for cells in (16, 32):
        g = cartesian_grid(2, 0.0, 1.0, cells)
        u = sample(g, lambda x: np.sin(x[:, 0]) * np.cos(x[:, 1]))
        ex = np.stack([np.cos(g.points[:, 0]) * np.cos(g.points[:, 1]),
                       -np.sin(g.points[:, 0]) * np.sin(g.points[:, 1])], axis=1)
        errs.append(np.max(np.abs(u.gradient - ex)))
    assert errs[1] <= errs[0] / 3.5


@pytest.mark.parametrize("make", [lambda: radial_grid(2, 1.0, 8), lambda: radial_grid(3, 0.5, 6),
                                  lambda: cartesian_grid(2, 0.0, 1.0, 5),
                                  lambda: scattered_grid(np.eye(3), [1.0, 2.0, 3.0])])
def test_csv_round_trip(tmp_path, make):
    g = make()
    u = sample(g, lambda x: x[:, 0] - 2 * x[:, -1], lambda x: np.tile([1.0] + [0.0] * (g.n - 2) + [-2.0],
                                                                     (x.shape[0], 1)))
    path = save_csv(u, tmp_path / "u.csv")
    back = load_csv(path)
    assert back.grid.kind == g.kind
    assert np.array_equal(back.values, u.values)
    assert np.array_equal(back.gradient, u.gradient)


def test_csv_mismatched_sidecar(tmp_path):
    u = sample(radial_grid(2, 1.0, 8), lambda x: x[:, 0])
    path = save_csv(u, tmp_path / "u.csv")
    side = tmp_path / "u.csv.json"
    side.write_text(side.read_text().replace('"shells": 8', '"shells": 9'))
    with pytest.raises(GridError):
        load_csv(path)


def test_seed_basket_has_twelve_members():
    assert len(BASKET) == 12 and len(set(seed_names())) == 12


@pytest.mark.parametrize("seed", seed_names())
def test_seed_gradients_match_differences(seed):
    x = np.array([[0.31, -0.17, 0.22], [-0.4, 0.05, 0.13]])
    s = [b for b in BASKET if b.name == seed][0]
    h = 1e-6
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        fd = (s.f(x + e) - s.f(x - e)) / (2 * h)
        assert np.allclose(fd, s.grad(x)[:, i], atol=1e-6)
