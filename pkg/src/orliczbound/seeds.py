"""A fixed basket of smooth and Lipschitz test fields with exact gradients.

Each seed maps an ``(N, n)`` array of points to values and gradients and
works in any dimension.  Amplitudes vary over four orders of magnitude
because Orlicz modulars are not homogeneous.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sampled import Grid, SampledFunction

__all__ = ["Seed", "BASKET", "seed_names", "get_seed", "sample_seed"]


@dataclass(frozen=True)
class Seed:
    name: str
    f: Callable
    grad: Callable
    radial: bool = False


def _e(x, i):
    g = np.zeros_like(x)
    g[:, i] = 1.0
    return g


def _norm(x):
    return np.linalg.norm(x, axis=1)


def _cone_grad(x):
    r = _norm(x)[:, None]
    return np.divide(x, r, out=np.zeros_like(x), where=r > 0)


def _bump(c, k):
    c = np.asarray(c, dtype=float)

    def f(x):
        cc = c[: x.shape[1]]
        return np.exp(-k * np.sum((x - cc) ** 2, axis=1))

    def g(x):
        cc = c[: x.shape[1]]
        return -2 * k * (x - cc) * f(x)[:, None]

    return f, g


def _tent(x):
    return np.maximum(0.0, 1.0 - 2.0 * _norm(x))


def _tent_grad(x):
    inside = (_norm(x) < 0.5)[:, None]
    return np.where(inside, -2.0 * _cone_grad(x), 0.0)


_b1 = _bump([0.0, 0.0, 0.0], 4.0)
_b2 = _bump([0.3, -0.2, 0.1], 8.0)

BASKET: tuple[Seed, ...] = (
    Seed("linear", lambda x: x[:, 0], lambda x: _e(x, 0)),
    Seed("oblique", lambda x: x[:, 0] + 0.5 * x[:, 1],
         lambda x: _e(x, 0) + 0.5 * _e(x, 1)),
    Seed("bowl", lambda x: np.sum(x ** 2, axis=1), lambda x: 2 * x, radial=True),
    Seed("saddle", lambda x: x[:, 0] * x[:, 1],
         lambda x: x[:, [1]] * _e(x, 0) + x[:, [0]] * _e(x, 1)),
    Seed("cone", _norm, _cone_grad, radial=True),
    Seed("bump", _b1[0], _b1[1], radial=True),
    Seed("cubic", lambda x: x[:, 0] ** 3, lambda x: 3 * x[:, [0]] ** 2 * _e(x, 0)),
    Seed("wave", lambda x: np.sin(np.pi * x[:, 0]),
         lambda x: np.pi * np.cos(np.pi * x[:, [0]]) * _e(x, 0)),
    Seed("tent", _tent, _tent_grad, radial=True),
    Seed("offset_bump", _b2[0], _b2[1]),
    Seed("steep", lambda x: 10.0 * x[:, 0], lambda x: 10.0 * _e(x, 0)),
    Seed("shallow", lambda x: 0.01 * np.sum(x ** 2, axis=1), lambda x: 0.02 * x,
         radial=True),
)


def seed_names():
    return [s.name for s in BASKET]


def get_seed(name: str) -> Seed:
    for s in BASKET:
        if s.name == name:
            return s
    raise KeyError(name)


def sample_seed(seed: Seed | str, grid: Grid, scale: float = 1.0) -> SampledFunction:
    """Sample ``scale * seed`` with its exact gradient."""
    s = get_seed(seed) if isinstance(seed, str) else seed
    x = grid.points
    return SampledFunction(grid, scale * s.f(x), scale * s.grad(x))
