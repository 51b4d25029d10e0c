"""Discrete convex variational problems with ``A``/``B``-growth.

Unknowns live on the vertices of a uniform box grid; each cell carries the
forward-difference gradient from its lower corner and the mean of its
corner values.  The energy

    sum_cells |cell| (theta A(|grad|) + (1 - theta) B(|grad|) + e E(|u|))

is minimized over interior vertices by monotone FISTA with backtracking.
"""
from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ._expr import compile_expression
from .admissibility import GrowthSpec, analyze
from .sampled import SampledFunction, scattered_grid
from .young import YoungFunction, YoungFunctionError, from_dict, parse_spec, power

__all__ = [
    "FunctionalSpec",
    "DiscreteProblem",
    "MinimizeResult",
    "EnvelopeError",
    "discretize",
    "minimize",
    "quasi_min_check",
    "convexity_defect",
    "boundedness_sweep",
    "write_sweep_csv",
    "load_config",
    "problem_from_config",
]

STRUCTURE_MODES = ("jointly_convex", "convex_in_gradient_with_monotone_E")
STALL_WINDOW = 50
# energies within this many ulps count as tied in the monotone step
TIE_ULPS = 4


class EnvelopeError(ArithmeticError):
    pass


@dataclass
class FunctionalSpec:
    """``f(x, t, xi) = theta(x) A(|xi|) + (1 - theta(x)) B(|xi|) + e_coef E(|t|)``."""

    A: YoungFunction
    B: YoungFunction
    theta: object = 1.0
    E: Optional[YoungFunction] = None
    e_coef: float = 0.0
    boundary: object = 0.0
    structure_mode: str = "jointly_convex"
    L: float = 1.0

    def __post_init__(self):
        if self.structure_mode not in STRUCTURE_MODES:
            raise YoungFunctionError(f"structure_mode must be one of {STRUCTURE_MODES}",
                                     "structure_mode")
        if not self.e_coef >= 0:
            raise YoungFunctionError("e_coef must be nonnegative", "e_coef")


def _field(expr, n):
    if callable(expr):
        return expr
    if isinstance(expr, (int, float)):
        c = float(expr)
        return lambda x: np.full(x.shape[0], c)
    return compile_expression(expr, n)


@dataclass(eq=False)
class DiscreteProblem:
    n: int
    cells: int
    lo: float
    hi: float
    spec: FunctionalSpec
    vertices: np.ndarray = field(repr=False)
    interior: np.ndarray = field(repr=False)
    boundary_values: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)

    @property
    def h(self):
        return (self.hi - self.lo) / self.cells

    @property
    def shape(self):
        return (self.cells + 1,) * self.n

    @property
    def cell_volume(self):
        return self.h ** self.n

    def full(self, x_int: np.ndarray) -> np.ndarray:
        u = self.boundary_values.copy()
        u[self.interior] = x_int
        return u

    # cell quantities -----------------------------------------------------
    def _lower(self, U):
        return U[(slice(0, -1),) * self.n]

    def _shift(self, U, d):
        idx = [slice(0, -1)] * self.n
        idx[d] = slice(1, None)
        return U[tuple(idx)]

    def cell_gradient(self, u: np.ndarray) -> np.ndarray:
        U = u.reshape(self.shape)
        base = self._lower(U)
        return np.stack([(self._shift(U, d) - base) / self.h for d in range(self.n)], axis=-1)

    def _corners(self):
        return list(itertools.product((0, 1), repeat=self.n))

    def _corner_view(self, U, corner):
        return U[tuple(slice(c, U.shape[i] - 1 + c) for i, c in enumerate(corner))]

    def cell_mean(self, u: np.ndarray) -> np.ndarray:
        U = u.reshape(self.shape)
        return sum(self._corner_view(U, c) for c in self._corners()) / 2 ** self.n

    def integrand(self, u: np.ndarray) -> np.ndarray:
        s = self.spec
        g = np.linalg.norm(self.cell_gradient(u), axis=-1)
        with np.errstate(over="ignore"):
            f = self.theta * s.A(g) + (1 - self.theta) * s.B(g)
            if s.E is not None and s.e_coef:
                f = f + s.e_coef * s.E(np.abs(self.cell_mean(u)))
        return f

    def energy(self, u: np.ndarray, cell_mask: Optional[np.ndarray] = None) -> float:
        f = self.integrand(u)
        if cell_mask is not None:
            f = f[cell_mask]
        return float(self.cell_volume * np.sum(f))

    def energy_gradient(self, u: np.ndarray) -> np.ndarray:
        """Gradient with respect to every vertex value (zero subgradient at kinks)."""
        s = self.spec
        G = self.cell_gradient(u)
        g = np.linalg.norm(G, axis=-1)
        with np.errstate(over="ignore", invalid="ignore"):
            dA = self.theta * s.A.derivative(g) + (1 - self.theta) * s.B.derivative(g)
            coef = np.where(g > 0, dA / np.where(g > 0, g, 1.0), 0.0)
        flux = coef[..., None] * G * (self.cell_volume / self.h)
        out = np.zeros(self.shape)
        low = (slice(0, -1),) * self.n
        out[low] -= flux.sum(axis=-1)
        for d in range(self.n):
            idx = [slice(0, -1)] * self.n
            idx[d] = slice(1, None)
            out[tuple(idx)] += flux[..., d]
        if s.E is not None and s.e_coef:
            m = self.cell_mean(u)
            dE = s.e_coef * s.E.derivative(np.abs(m)) * np.sign(m) * self.cell_volume / 2 ** self.n
            U = np.zeros(self.shape)
            for c in self._corners():
                self._corner_view(U, c)[...] += dE
            out += U
        return out.reshape(-1)

    def envelope_check(self, u: np.ndarray) -> float:
        """Smallest ``L`` with ``A - E - L <= f <= B + E + L`` on all cells.

        Raises :class:`EnvelopeError` when it exceeds the spec's ``L``.
        """
        s = self.spec
        g = np.linalg.norm(self.cell_gradient(u), axis=-1)
        f = self.integrand(u)
        e = s.E(np.abs(self.cell_mean(u))) if s.E is not None else 0.0
        with np.errstate(invalid="ignore"):
            need = max(float(np.max(s.A(g) - e - f)), float(np.max(f - s.B(g) - e)), 0.0)
        if need > s.L * (1 + 1e-12):
            raise EnvelopeError(f"growth envelope needs L >= {need:g} > {s.L:g}")
        return need

    def sampled(self, u: np.ndarray) -> SampledFunction:
        """Vertex values with trapezoidal weights."""
        w1 = np.full(self.cells + 1, self.h)
        w1[[0, -1]] *= 0.5
        w = np.ones(1)
        for _ in range(self.n):
            w = np.multiply.outer(w, w1)
        return SampledFunction(scattered_grid(self.vertices, w.reshape(-1)), u)


def discretize(spec: FunctionalSpec, n: int = 2, cells: int = 16, lo: float = -1.0,
               hi: float = 1.0) -> DiscreteProblem:
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    if cells < 8:
        raise ValueError("need at least 8 cells per axis")
    if not hi > lo:
        raise ValueError("degenerate box")
    axis = np.linspace(lo, hi, cells + 1)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    verts = np.stack([m.reshape(-1) for m in mesh], axis=-1)
    idx = np.stack(np.meshgrid(*([np.arange(cells + 1)] * n), indexing="ij"), -1).reshape(-1, n)
    interior = np.all((idx > 0) & (idx < cells), axis=1)
    bvals = np.zeros(len(verts))
    bvals[~interior] = _field(spec.boundary, n)(verts[~interior])
    if not np.all(np.isfinite(bvals)):
        raise ValueError("boundary data must be finite")
    h = (hi - lo) / cells
    centres = np.stack([m.reshape(-1) for m in np.meshgrid(
        *([lo + h * (np.arange(cells) + 0.5)] * n), indexing="ij")], axis=-1)
    theta = _field(spec.theta, n)(centres).reshape((cells,) * n)
    if np.any(theta < 0) or np.any(theta > 1):
        raise ValueError("theta must lie in [0, 1]")
    return DiscreteProblem(n, cells, float(lo), float(hi), spec, verts, interior, bvals, theta)


@dataclass
class MinimizeResult:
    u: SampledFunction
    values: np.ndarray = field(repr=False)
    energy_trace: list = field(repr=False)
    converged: bool = False
    iterations: int = 0

    @property
    def energy(self):
        return self.energy_trace[-1]


def minimize(problem: DiscreteProblem, tol: float = 1e-12, max_iters: int = 20000,
             x0: Optional[np.ndarray] = None) -> MinimizeResult:
    """Monotone FISTA with backtracking and momentum restart.

    Stops when the energy drops by less than ``tol`` (relative) over 50
    iterations while the squared gradient norm has not dropped fourfold in
    that window, or when the projected gradient vanishes.  Energies that agree to
    within a few ulps are compared by gradient norm instead, so the trace is
    nonincreasing up to that rounding.
    """
    P = problem
    x = np.zeros(int(P.interior.sum())) if x0 is None else np.asarray(x0, float).copy()

    def F(v):
        return P.energy(P.full(v))

    def grad(v):
        return P.energy_gradient(P.full(v))[P.interior]

    fx = F(x)
    trace = [fx]
    y, t_mom, Lip = x.copy(), 1.0, 1.0
    converged = False
    it = 0
    gnorms = []
    for it in range(1, max_iters + 1):
        gy = grad(y)
        fy = F(y)
        gg = float(gy @ gy)
        gnorms.append(gg)
        if gg == 0.0 and np.array_equal(y, x):
            converged = True
            break
        Lip *= 0.5
        while True:
            z = y - gy / Lip
            fz = F(z)
            if np.isfinite(fz) and fz <= fy - 0.5 * gg / Lip * (1 - 1e-12):
                break
            if np.isfinite(fz) and fz <= fy + TIE_ULPS * np.spacing(abs(fy)):
                # decrease below energy resolution: test the curvature instead
                d = z - y
                if float((grad(z) - gy) @ d) <= Lip * float(d @ d):
                    break
            Lip *= 2.0
            if Lip > 1e300:
                break
        t_new = 0.5 * (1 + math.sqrt(1 + 4 * t_mom ** 2))
        accept = fz <= fx
        if not accept and fz <= fx + TIE_ULPS * np.spacing(abs(fx)):
            # energies agree to rounding: let the gradient norm decide
            gz, gx = grad(z), grad(x)
            accept = float(gz @ gz) < float(gx @ gx)
        if accept:
            x_new, f_new = z, fz
            y = z + ((t_mom - 1) / t_new) * (z - x)
            t_mom = t_new
        else:
            # restart: keep the old iterate and drop momentum
            x_new, f_new = x, fx
            y, t_mom = x.copy(), 1.0
        x, fx = x_new, f_new
        trace.append(fx)
        if it > STALL_WINDOW:
            old = trace[-1 - STALL_WINDOW]
            # below energy resolution, keep going while the gradient still shrinks
            still_improving = min(gnorms[-STALL_WINDOW:]) < 0.25 * min(gnorms[:-STALL_WINDOW])
            if old - fx <= tol * max(abs(old), 1e-300) and not still_improving:
                converged = True
                break
    u_full = P.full(x)
    return MinimizeResult(P.sampled(u_full), u_full, trace, converged, it)


def _touching_cells(P: DiscreteProblem, node_mask: np.ndarray) -> np.ndarray:
    M = node_mask.reshape(P.shape)
    out = np.zeros((P.cells,) * P.n, dtype=bool)
    for c in P._corners():
        out |= P._corner_view(M, c)
    return out


def quasi_min_check(problem: DiscreteProblem, u: np.ndarray, Q: float = 1 + 1e-6,
                    trials: int = 100, seed: int = 0, amplitude: float = 0.1) -> dict:
    """``F(u, supp phi) <= Q F(u + phi, supp phi)`` for random boxes ``phi``."""
    P = problem
    rng = np.random.default_rng(seed)
    idx = np.stack(np.meshgrid(*([np.arange(P.cells + 1)] * P.n), indexing="ij"), -1).reshape(-1, P.n)
    scale = max(1.0, float(np.max(np.abs(u))))
    worst, failures = 0.0, []
    for k in range(trials):
        a = rng.integers(1, P.cells, size=P.n)
        b = np.minimum(a + rng.integers(0, max(2, P.cells // 2), size=P.n), P.cells - 1)
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        support = np.all((idx >= lo) & (idx <= hi), axis=1)
        phi = np.zeros_like(u)
        phi[support] = amplitude * scale * rng.standard_normal(int(support.sum()))
        cells = _touching_cells(P, support)
        f0 = P.energy(u, cells)
        f1 = P.energy(u + phi, cells)
        ratio = f0 / f1 if f1 > 0 else (0.0 if f0 == 0 else math.inf)
        worst = max(worst, ratio)
        if f0 > Q * f1:
            failures.append(k)
    return {"trials": trials, "Q": Q, "violations": len(failures), "failing_trials": failures,
            "worst_ratio": worst}


def convexity_defect(problem: DiscreteProblem, u: np.ndarray, v: np.ndarray, lam: float) -> float:
    """``lam F(u) + (1 - lam) F(v) - F(lam u + (1 - lam) v)``; nonnegative for convex ``F``."""
    P = problem
    return lam * P.energy(u) + (1 - lam) * P.energy(v) - P.energy(lam * u + (1 - lam) * v)


def interior_sup(problem: DiscreteProblem, u: np.ndarray) -> float:
    """``max |u|`` over vertices of the concentric half-size box."""
    c = 0.5 * (problem.lo + problem.hi)
    quarter = 0.25 * (problem.hi - problem.lo)
    inside = np.all(np.abs(problem.vertices - c) <= quarter + 1e-12, axis=1)
    return float(np.max(np.abs(u[inside])))


# ---------------------------------------------------------------------------
# sweep

SWEEP_COLUMNS = ("p", "q", "refinement", "interior_sup", "energy", "converged", "verdict")


def boundedness_sweep(n: int, p_list: Sequence[float], q_list: Sequence[float],
                      refinements: Sequence[int] = (0, 1, 2), base_cells: int = 8,
                      boundary="x1", theta="where(x1 < 0, 1.0, 0.0)", tol: float = 1e-10,
                      max_iters: int = 5000, verdicts: bool = True) -> list[dict]:
    """Minimize the mixed ``theta``-integrand for each ``(p, q)`` and refinement.

    ``theta`` puts ``A = t^p`` growth on ``x1 < 0`` and ``B = t^q`` growth on
    the rest; refinement ``j`` uses ``base_cells * 2^j`` cells per axis.
    Solver non-convergence is recorded, not raised.
    """
    rows = []
    for p in p_list:
        for q in q_list:
            A, B = power(p), power(q)
            verdict = analyze(GrowthSpec(A, B, n)).outcome if verdicts else ""
            spec = FunctionalSpec(A, B, theta=theta, boundary=boundary)
            for j in refinements:
                P = discretize(spec, n, base_cells * 2 ** j)
                res = minimize(P, tol, max_iters)
                rows.append({"p": p, "q": q, "refinement": j,
                             "interior_sup": interior_sup(P, res.values),
                             "energy": res.energy, "converged": res.converged,
                             "verdict": verdict})
    return rows


def write_sweep_csv(rows: list[dict], path, header: Optional[dict] = None) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        if header:
            fh.write("# " + json.dumps(header, sort_keys=True) + "\n")
        w = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in r.items()})
    return path


# ---------------------------------------------------------------------------
# configuration documents

def _young(doc, path):
    if doc is None:
        return None
    if isinstance(doc, str):
        try:
            return parse_spec(doc)
        except YoungFunctionError as exc:
            raise YoungFunctionError(str(exc), path) from None
    return from_dict(doc, path)


def load_config(path) -> dict:
    return json.loads(Path(path).read_text())


def problem_from_config(cfg: dict) -> tuple[DiscreteProblem, dict]:
    """Build a problem from a configuration document.

    Keys: ``n``, ``cells``, ``lo``, ``hi``, ``boundary`` and ``theta``
    (expressions in ``x1 .. xn``), ``A``, ``B``, ``E`` (function specs),
    ``e_coef``, ``L``, ``structure_mode`` and a ``solver`` object with
    ``tol`` and ``max_iters``.
    """
    known = {"n", "cells", "lo", "hi", "boundary", "theta", "A", "B", "E", "e_coef", "L",
             "structure_mode", "solver"}
    extra = set(cfg) - known
    if extra:
        raise YoungFunctionError(f"unknown keys {sorted(extra)}", "$")
    if "A" not in cfg:
        raise YoungFunctionError("missing function spec", "$.A")
    A = _young(cfg["A"], "$.A")
    B = _young(cfg.get("B", cfg["A"]), "$.B")
    E = _young(cfg.get("E"), "$.E")
    spec = FunctionalSpec(A, B, theta=cfg.get("theta", 1.0), E=E,
                          e_coef=float(cfg.get("e_coef", 0.0)),
                          boundary=cfg.get("boundary", 0.0),
                          structure_mode=cfg.get("structure_mode", "jointly_convex"),
                          L=float(cfg.get("L", 1.0)))
    P = discretize(spec, int(cfg.get("n", 2)), int(cfg.get("cells", 16)),
                   float(cfg.get("lo", -1.0)), float(cfg.get("hi", 1.0)))
    solver = {"tol": 1e-12, "max_iters": 20000, **cfg.get("solver", {})}
    return P, solver
