"""Scalar fields sampled on quadrature grids over balls and boxes.

Radial grids (n = 2 or 3) are tensor products of radial shells with an
angular rule, stored shell-major so that per-shell sphere integrals are a
reshape away.  Cartesian grids use cell centres.  Every node carries its
measure weight, so integrals are weighted sums.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

import numpy as np

__all__ = [
    "GridError",
    "Grid",
    "SampledFunction",
    "radial_grid",
    "cartesian_grid",
    "sample",
    "unit_ball_volume",
    "sphere_area",
    "save_csv",
    "load_csv",
]


class GridError(ValueError):
    pass


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return n * unit_ball_volume(n)


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes and weights plus enough structure to differentiate.

    ``kind`` is ``"radial"``, ``"cartesian"`` or ``"scattered"``.
    """

    kind: str
    n: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    params: dict = field(default_factory=dict)

    @property
    def size(self):
        return len(self.weights)

    @property
    def measure(self):
        return float(np.sum(self.weights))

    def same_as(self, other: "Grid") -> bool:
        return (self is other) or (
            self.kind == other.kind and self.n == other.n
            and self.points.shape == other.points.shape
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.weights, other.weights))

    # radial structure -----------------------------------------------------
    @property
    def shape(self):
        if self.kind == "radial":
            return tuple(self.params["shape"])
        if self.kind == "cartesian":
            return tuple(self.params["cells"])
        raise GridError("scattered grids have no tensor shape")

    @cached_property
    def edges(self) -> np.ndarray:
        p = self.params
        return np.linspace(0.0, p["radius"], p["shells"] + 1)

    @cached_property
    def radii(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[1:] + e[:-1])

    @cached_property
    def angular_weights(self) -> np.ndarray:
        """Angular rule normalized to the sphere area; shape = shape[1:]."""
        return self.params_array("angular_weights")

    @cached_property
    def directions(self) -> np.ndarray:
        """Unit vectors of the angular nodes, shape ``shape[1:] + (n,)``."""
        return self.params_array("directions")

    def params_array(self, key):
        return np.asarray(self.params[key])

    def to_header(self) -> dict:
        keep = {k: v for k, v in self.params.items()
                if k not in ("angular_weights", "directions", "theta", "phi")}
        return {"kind": self.kind, "n": self.n, **keep}


def _angular_rule(n, order):
    if n == 2:
        n_phi = 2 * order
        phi = 2 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
        w = np.full(n_phi, 2 * math.pi / n_phi)
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        return (n_phi,), w, dirs, {"phi": phi}
    if n == 3:
        n_theta, n_phi = order, 2 * order
        x, wx = np.polynomial.legendre.leggauss(n_theta)
        # ascending theta
        cos_t, wx = x[::-1], wx[::-1]
        theta = np.arccos(cos_t)
        phi = 2 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
        w = np.outer(wx, np.full(n_phi, 2 * math.pi / n_phi))
        st = np.sin(theta)[:, None]
        dirs = np.stack([st * np.cos(phi)[None, :], st * np.sin(phi)[None, :],
                         np.broadcast_to(cos_t[:, None], (n_theta, n_phi))], axis=-1)
        return (n_theta, n_phi), w, dirs, {"theta": theta, "phi": phi}
    raise GridError(f"radial grids are implemented for n = 2, 3; got n = {n}")


def radial_grid(n: int, radius: float = 1.0, shells: int = 128,
                order: Optional[int] = None) -> Grid:
    """Ball of ``radius`` in R^n split into ``shells`` equal-width shells.

    Nodes sit at shell midpoints; each weight is the exact shell volume
    times the angular weight, so the weights sum to the ball volume.
    ``order`` defaults to ``2n + 2`` (Gauss-Legendre nodes in cos(theta)
    for n = 3; ``2 * order`` equispaced azimuths in both dimensions).
    """
    if shells < 2:
        raise GridError("need at least 2 shells")
    order = 2 * n + 2 if order is None else int(order)
    ang_shape, w_ang, dirs, extra = _angular_rule(n, order)
    edges = np.linspace(0.0, radius, shells + 1)
    r = 0.5 * (edges[1:] + edges[:-1])
    shell_vol = (edges[1:] ** n - edges[:-1] ** n) / n
    weights = shell_vol.reshape((-1,) + (1,) * len(ang_shape)) * w_ang[None]
    points = r.reshape((-1,) + (1,) * (len(ang_shape) + 1)) * dirs[None]
    params = {"radius": float(radius), "shells": int(shells), "order": order,
              "shape": [shells, *ang_shape], "angular_weights": w_ang,
              "directions": dirs, **{k: v for k, v in extra.items()}}
    return Grid("radial", n, points.reshape(-1, n), weights.reshape(-1), params)


def cartesian_grid(n: int, lo=0.0, hi=1.0, cells: int | tuple = 64) -> Grid:
    """Cell centres of the box ``[lo, hi]^n``, weight ``prod(h)`` each."""
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (n,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (n,))
    cells = tuple(np.broadcast_to(np.asarray(cells, dtype=int), (n,)).tolist())
    if min(cells) < 2 or np.any(hi <= lo):
        raise GridError("degenerate box or too few cells")
    h = (hi - lo) / np.asarray(cells)
    axes = [lo[i] + h[i] * (np.arange(cells[i]) + 0.5) for i in range(n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    points = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    weights = np.full(points.shape[0], float(np.prod(h)))
    params = {"lo": lo.tolist(), "hi": hi.tolist(), "cells": list(cells), "h": h.tolist()}
    return Grid("cartesian", n, points, weights, params)


def scattered_grid(points, weights) -> Grid:
    points = np.atleast_2d(np.asarray(points, dtype=float))
    weights = np.asarray(weights, dtype=float)
    if points.shape[0] != weights.shape[0] or np.any(weights <= 0):
        raise GridError("need one positive weight per point")
    return Grid("scattered", points.shape[1], points, weights, {})


# ---------------------------------------------------------------------------

def _periodic_derivative(u, axis):
    """Spectral derivative along a uniform periodic axis of period 2*pi."""
    m = u.shape[axis]
    k = np.fft.fftfreq(m, d=1.0 / m)
    if m % 2 == 0:
        k[m // 2] = 0.0
    shape = [1] * u.ndim
    shape[axis] = m
    return np.real(np.fft.ifft(1j * k.reshape(shape) * np.fft.fft(u, axis=axis), axis=axis))


def _diff_matrix(x):
    """Barycentric Lagrange differentiation matrix on the nodes ``x``."""
    d = x[:, None] - x[None, :]
    np.fill_diagonal(d, 1.0)
    w = 1.0 / np.prod(d, axis=1)
    D = (w[None, :] / w[:, None]) / d
    np.fill_diagonal(D, 0.0)
    np.fill_diagonal(D, -D.sum(axis=1))
    return D


def _fd_radial(grid: Grid, values):
    # radial: second-order differences; angular: spectral in phi, Lagrange in theta
    n = grid.n
    shape = grid.shape
    u = values.reshape(shape)
    r = grid.radii
    du_dr = np.gradient(u, r, axis=0, edge_order=2)
    rr = r.reshape((-1,) + (1,) * (len(shape) - 1))
    if n == 2:
        phi = grid.params["phi"]
        du_dphi = _periodic_derivative(u, 1)
        er = np.stack([np.cos(phi), np.sin(phi)], axis=-1)
        ephi = np.stack([-np.sin(phi), np.cos(phi)], axis=-1)
        g = du_dr[..., None] * er[None] + (du_dphi / rr)[..., None] * ephi[None]
    else:
        theta, phi = grid.params["theta"], grid.params["phi"]
        du_dth = np.einsum("ij,sjk->sik", _diff_matrix(theta), u)
        du_dphi = _periodic_derivative(u, 2)
        st, ct = np.sin(theta)[:, None], np.cos(theta)[:, None]
        cp, sp = np.cos(phi)[None, :], np.sin(phi)[None, :]
        full = (len(theta), len(phi))
        er = np.stack([st * cp, st * sp, np.broadcast_to(ct, full)], -1)
        eth = np.stack([ct * cp, ct * sp, np.broadcast_to(-st, full)], -1)
        eph = np.stack([np.broadcast_to(-sp, full), np.broadcast_to(cp, full), np.zeros(full)], -1)
        g = (du_dr[..., None] * er[None] + (du_dth / rr)[..., None] * eth[None]
             + (du_dphi / (rr * st[None]))[..., None] * eph[None])
    return g.reshape(-1, n)


def _fd_cartesian(grid: Grid, values):
    u = values.reshape(grid.shape)
    h = grid.params["h"]
    parts = np.gradient(u, *h, edge_order=2)
    if grid.n == 1:
        parts = [parts]
    return np.stack([p.reshape(-1) for p in parts], axis=-1)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Values (and optionally gradients) of a scalar field on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray = field(repr=False)
    gradient_values: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.shape[0] != self.grid.size:
            raise GridError(f"{v.shape[0]} values for {self.grid.size} nodes")
        object.__setattr__(self, "values", v)
        if self.gradient_values is not None:
            g = np.asarray(self.gradient_values, dtype=float).reshape(self.grid.size, self.grid.n)
            object.__setattr__(self, "gradient_values", g)

    @property
    def points(self):
        return self.grid.points

    @property
    def weights(self):
        return self.grid.weights

    @property
    def n(self):
        return self.grid.n

    @property
    def has_fd_fallback(self):
        return self.grid.kind in ("radial", "cartesian")

    @cached_property
    def gradient(self) -> np.ndarray:
        """Stored gradient, else centred second-order differences."""
        if self.gradient_values is not None:
            return self.gradient_values
        if self.grid.kind == "radial":
            return _fd_radial(self.grid, self.values)
        if self.grid.kind == "cartesian":
            return _fd_cartesian(self.grid, self.values)
        raise GridError("no gradient stored and no finite-difference rule for scattered nodes")

    @cached_property
    def grad_norm(self) -> np.ndarray:
        return np.linalg.norm(self.gradient, axis=1)

    def integral(self, f=None) -> float:
        vals = self.values if f is None else f
        return float(np.sum(self.weights * vals))

    def mean(self) -> float:
        return self.integral() / self.grid.measure

    def with_values(self, values, gradient=None) -> "SampledFunction":
        return SampledFunction(self.grid, values, gradient)

    def __mul__(self, c: float) -> "SampledFunction":
        g = None if self.gradient_values is None else c * self.gradient_values
        return SampledFunction(self.grid, c * self.values, g)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def shift(self, c: float) -> "SampledFunction":
        return SampledFunction(self.grid, self.values + c, self.gradient_values)


def sample(grid: Grid, f: Callable, grad: Optional[Callable] = None) -> SampledFunction:
    """Evaluate ``f`` (and ``grad``) on the nodes; both take an ``(N, n)`` array."""
    x = grid.points
    vals = np.broadcast_to(np.asarray(f(x), dtype=float), (grid.size,))
    g = None if grad is None else np.asarray(grad(x), dtype=float)
    return SampledFunction(grid, vals.copy(), g)


# ---------------------------------------------------------------------------
# CSV exchange

def save_csv(u: SampledFunction, path) -> Path:
    """Write ``x1..xn, weight, value[, g1..gn]`` plus a JSON sidecar grid header."""
    path = Path(path)
    cols = [u.points, u.weights[:, None], u.values[:, None]]
    names = [f"x{i + 1}" for i in range(u.n)] + ["weight", "value"]
    if u.gradient_values is not None:
        cols.append(u.gradient_values)
        names += [f"g{i + 1}" for i in range(u.n)]
    np.savetxt(path, np.hstack(cols), delimiter=",", fmt="%.17g",
               header=",".join(names), comments="")
    side = path.with_name(path.name + ".json")
    side.write_text(json.dumps(u.grid.to_header(), indent=2, sort_keys=True) + "\n")
    return path


def load_csv(path) -> SampledFunction:
    """Inverse of :func:`save_csv`; rebuilds structured grids from the sidecar."""
    path = Path(path)
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    data = np.loadtxt(lines[1:], delimiter=",", ndmin=2)
    n = sum(1 for h in header if h.startswith("x"))
    side = path.with_name(path.name + ".json")
    meta = json.loads(side.read_text()) if side.exists() else {"kind": "scattered"}
    pts, w, v = data[:, :n], data[:, n], data[:, n + 1]
    g = data[:, n + 2:n + 2 + n] if data.shape[1] >= 2 * n + 2 else None
    kind = meta.get("kind")
    if kind == "radial":
        grid = radial_grid(n, meta["radius"], meta["shells"], meta["order"])
    elif kind == "cartesian":
        grid = cartesian_grid(n, meta["lo"], meta["hi"], tuple(meta["cells"]))
    else:
        grid = scattered_grid(pts, w)
    if grid.size != len(v) or not np.allclose(grid.points, pts, rtol=0, atol=1e-12):
        raise GridError("CSV nodes do not match the grid described by the sidecar")
    return SampledFunction(grid, v, g)
