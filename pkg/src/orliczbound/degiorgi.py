"""Level energies, the good-radii cutoff, hole filling and the decay iteration.

All radial quantities use the shell structure of a radial :class:`Grid`:
the annulus ``B_sigma \\ B_rho`` is the union of whole shells, a shell of
width ``h`` at midpoint ``r`` carries radial measure ``h r^(n-1)`` and the
angular rule of the grid integrates over the unit sphere.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .sampled import Grid, GridError, SampledFunction, radial_grid, sphere_area
from .seeds import BASKET, Seed, sample_seed
from .sobolev import integral_profile, regularize_near_zero, sobolev_conjugate
from .young import YoungFunction, YoungFunctionError, phi_q

__all__ = [
    "LevelEnergy",
    "level_energy",
    "CutoffResult",
    "SphereConstant",
    "calibrate_sphere_kappa",
    "optimized_cutoff",
    "HoleFilling",
    "hole_filling_constant",
    "hole_filling",
    "IterationTrace",
    "schedule",
    "iterate",
    "iterate_field",
    "SupBoundError",
    "sup_bound_from_trace",
    "two_sided_sup_bound",
    "write_trace_csv",
]

MIN_SHELLS = 64
CLAIM_RTOL = 1e-6
# log-space slack for the equality cases of the decay chain
LOG_RTOL = 1e-12


# ---------------------------------------------------------------------------
# level energy

@dataclass(frozen=True)
class LevelEnergy:
    k: float
    r: float
    value: float
    level_set_measure: float


def _ball_weights(grid: Grid, r: float) -> np.ndarray:
    """Quadrature weights restricted to ``B_r``.

    On radial grids a shell cut by ``|x| = r`` keeps the fraction of its
    volume inside the ball, so the weights are nondecreasing in ``r``.
    """
    if grid.kind == "radial":
        if r > grid.params["radius"] * (1 + 1e-12):
            raise GridError(f"grid of radius {grid.params['radius']} does not cover B_{r}")
        e, n = grid.edges, grid.n
        inner = np.clip(r, e[:-1], e[1:])
        frac = (inner ** n - e[:-1] ** n) / (e[1:] ** n - e[:-1] ** n)
        per_shell = np.repeat(frac, grid.size // len(frac))
        return grid.weights * per_shell
    if grid.kind == "cartesian":
        lo, hi = np.asarray(grid.params["lo"]), np.asarray(grid.params["hi"])
        if np.any(lo > -r + 1e-12) or np.any(hi < r - 1e-12):
            raise GridError(f"box [{lo}, {hi}] does not cover B_{r}")
    inside = np.linalg.norm(grid.points, axis=1) <= r * (1 + 1e-12)
    return np.where(inside, grid.weights, 0.0)


def level_energy(u: SampledFunction, A: YoungFunction, k: float, r: float) -> LevelEnergy:
    """``J(k, r) = int_{B_r} A((u - k)_+) + A(|grad (u - k)_+|)``.

    The gradient of the truncation is ``grad u`` on ``{u > k}`` and zero
    elsewhere.
    """
    if not 0 < r <= 1:
        raise ValueError(f"need 0 < r <= 1, got {r}")
    if not k >= 0:
        raise ValueError(f"need k >= 0, got {k}")
    w = _ball_weights(u.grid, r)
    above = u.values > k
    if not np.any(above & (w > 0)):
        return LevelEnergy(float(k), float(r), 0.0, 0.0)
    excess = np.where(above, u.values - k, 0.0)
    g = np.where(above, u.grad_norm, 0.0)
    with np.errstate(over="ignore"):
        val = float(np.sum(w * (A(excess) + A(g))))
    return LevelEnergy(float(k), float(r), val, float(np.sum(w[above])))


# ---------------------------------------------------------------------------
# sphere restrictions on radial grids

def _shell_slices(grid: Grid, rho: float, sigma: float):
    if grid.kind != "radial":
        raise GridError("the good-radii cutoff needs a radial grid")
    e = grid.edges
    h = e[1] - e[0]
    i0, i1 = rho / h, sigma / h
    if abs(i0 - round(i0)) > 1e-9 or abs(i1 - round(i1)) > 1e-9:
        raise GridError(f"rho={rho} and sigma={sigma} must be shell edges (width {h:g})")
    i0, i1 = int(round(i0)), int(round(i1))
    if i1 - i0 < MIN_SHELLS:
        raise GridError(f"only {i1 - i0} shells in [rho, sigma]; need >= {MIN_SHELLS}")
    return i0, i1, h


def _sphere_fields(u: SampledFunction):
    """Per shell: ``u_r`` and ``|grad_S u_r| = r |tangential part of grad u|``."""
    g = u.grid
    shape = g.shape
    vals = u.values.reshape(shape)
    grad = u.gradient.reshape(shape + (g.n,))
    z = g.directions[None]
    radial = np.sum(grad * z, axis=-1, keepdims=True)
    tang = np.linalg.norm(grad - radial * z, axis=-1)
    r = g.radii.reshape((-1,) + (1,) * (len(shape) - 1))
    return vals, r * tang, u.grad_norm.reshape(shape)


def _sphere_sum(w_ang, f):
    axes = tuple(range(1, f.ndim))
    return np.sum(w_ang[None] * f, axis=axes)


# ---------------------------------------------------------------------------
# sphere constants

@dataclass
class SphereConstant:
    n: int
    regime: str
    kappa: float
    worst_ratio: float
    seeds: list
    shells: int


def _sphere_A(A: YoungFunction, n: int) -> YoungFunction:
    # the (n-1)-dimensional conjugate needs convergence at zero
    if integral_profile(A, 1.0 / (n - 2)).at_zero != "converges":
        return regularize_near_zero(A, n - 1)
    return A


def _sphere_ratio(u: SampledFunction, A: YoungFunction, regime: str, kappa: float,
                  An1: Optional[YoungFunction]):
    """Worst ratio lhs / rhs of the sphere inequality over all shells."""
    n = u.n
    w = u.grid.angular_weights
    vals, gs, _ = _sphere_fields(u)
    with np.errstate(over="ignore"):
        Fr = _sphere_sum(w, A(np.abs(vals)) + A(gs))
    live = Fr > 0
    if not np.any(live):
        return 0.0
    scale = Fr[live] ** (1.0 / (n - 1))
    v = np.abs(vals[live])
    if regime == "supercritical":
        sup = np.max(v.reshape(v.shape[0], -1), axis=1)
        return float(np.max(sup / scale))
    arg = v / (kappa * scale.reshape((-1,) + (1,) * (v.ndim - 1)))
    with np.errstate(over="ignore"):
        lhs = _sphere_sum(w, An1(arg))
    return float(np.max(lhs / Fr[live]))


def calibrate_sphere_kappa(A: YoungFunction, n: int, regime: str,
                           seeds: Iterable[Seed] = BASKET, amplitudes=(1.0,),
                           shells: int = 64, max_k: int = 30) -> SphereConstant:
    """Smallest ``kappa = 2^k / 8`` for which the sphere inequality of ``regime``
    holds on every shell of every seed.

    ``subcritical``: ``int_S A_(n-1)(|u_r| / (kappa F_r^(1/(n-1)))) <= F_r``.
    ``supercritical``: ``max_S |u_r| <= kappa F_r^(1/(n-1))``.
    """
    seeds = list(seeds)
    grid = radial_grid(n, 1.0, shells)
    fields = [sample_seed(s, grid, a) for s in seeds for a in amplitudes]
    An1 = None
    if regime == "subcritical":
        if n < 3:
            raise YoungFunctionError("the subcritical sphere inequality needs n >= 3", "n")
        A = _sphere_A(A, n)
        An1 = sobolev_conjugate(A, n - 1).result
    elif regime != "supercritical":
        raise ValueError(f"unknown regime {regime!r}")
    for k in range(max_k + 1):
        kappa = 2.0 ** k / 8
        worst = max(_sphere_ratio(u, A, regime, kappa, An1) for u in fields)
        ok = worst <= kappa if regime == "supercritical" else worst <= 1 + CLAIM_RTOL
        if ok:
            return SphereConstant(n, regime, kappa, worst, [s.name for s in seeds], shells)
    raise ArithmeticError(f"no kappa <= 2^{max_k}/8 fits the {regime} sphere inequality")


# ---------------------------------------------------------------------------
# optimized cutoff

@dataclass
class CutoffResult:
    edges: np.ndarray = field(repr=False)
    eta: np.ndarray = field(repr=False)
    good: np.ndarray = field(repr=False)
    measure_U: float
    grad_eta_max: float
    shell_energy: float
    lhs: float
    bound: float
    kappa: float
    L: float
    c: float
    regime: str

    @property
    def holds(self) -> bool:
        return self.lhs <= self.bound * (1 + CLAIM_RTOL)

    def eta_at(self, r):
        """Piecewise-linear radial profile; 1 inside ``rho``, 0 outside ``sigma``."""
        return np.interp(r, self.edges, self.eta, left=1.0, right=0.0)


def _domination_factor(target: YoungFunction, B: YoungFunction, t_hi: float, max_k=60):
    """Smallest ``2^k`` with ``B(t) <= target(2^k t)`` on log probes in ``[1e-8, t_hi]``."""
    t = np.logspace(-8, math.log10(max(t_hi, 1.0)), 801)
    b = B(t)
    for k in range(max_k + 1):
        with np.errstate(over="ignore"):
            if np.all(b <= target(2.0 ** k * t) * (1 + 1e-12)):
                return 2.0 ** k
    raise ArithmeticError("B is not dominated by the sphere conjugate on the probe range")


def _power_factor(B: YoungFunction, q: float, args):
    """``max B(t) / t^q`` over the positive ``args``, rounded up to a power of two."""
    t = np.unique(args[args > 0])
    if t.size == 0:
        return 1.0
    r = float(np.max(B(t) / t ** q))
    if not math.isfinite(r):
        raise ArithmeticError(f"B is not bounded by L t^{q}")
    return max(1.0, 2.0 ** math.ceil(math.log2(r))) if r > 0 else 1.0


def optimized_cutoff(u: SampledFunction, A: YoungFunction, B: YoungFunction,
                     rho: float, sigma: float, q: float, regime: str,
                     kappa: Optional[float] = None, L: Optional[float] = None) -> CutoffResult:
    """Good-radii cutoff between ``B_rho`` and ``B_sigma`` and its energy bound.

    ``lhs = int B(|u grad eta|)`` and ``bound`` is the right-hand side of the
    regime's claim, with ``F`` the annulus energy of ``u``.  ``kappa`` is
    calibrated on the seed basket when omitted; ``L`` is the smallest power
    of two with ``B(t) <= A_(n-1)(L t)`` (subcritical) or ``B(t) <= L t^q``
    (supercritical); the latter is measured on the arguments
    ``2|u| / (sigma - rho)`` that the bound actually uses.
    """
    if not 0 < rho < sigma < 1:
        raise ValueError("need 0 < rho < sigma < 1")
    if not q > 1:
        raise ValueError("need q > 1")
    if regime not in ("subcritical", "supercritical"):
        raise ValueError(f"unknown regime {regime!r}")
    n = u.n
    i0, i1, h = _shell_slices(u.grid, rho, sigma)
    w_ang = u.grid.angular_weights
    if regime == "subcritical":
        if n < 3:
            raise YoungFunctionError("the subcritical cutoff needs n >= 3", "n")
        A = _sphere_A(A, n)
    vals, gs, gfull = _sphere_fields(u)
    sl = slice(i0, i1)
    r = u.grid.radii[sl]
    radial_w = h * r ** (n - 1)
    with np.errstate(over="ignore"):
        SA_u = _sphere_sum(w_ang, A(np.abs(vals[sl])))
        SA_g = _sphere_sum(w_ang, A(gs[sl]))
        SA_full = _sphere_sum(w_ang, A(gfull[sl]))
    ann_u = float(np.sum(radial_w * SA_u))
    ann_g = float(np.sum(radial_w * SA_full))
    F = ann_u + ann_g
    width = sigma - rho
    thresh = 4.0 / (width * r ** (n - 1))
    good = (SA_g <= thresh * ann_g) & (SA_u <= thresh * ann_u)
    measure_U = float(h * np.count_nonzero(good))
    grad_eta = 1.0 / measure_U
    edges = u.grid.edges[i0:i1 + 1]
    # eta(r) = |U cap (r, sigma)| / |U|
    tail = np.concatenate([np.cumsum(good[::-1])[::-1], [0]]) * h
    eta = tail / measure_U

    with np.errstate(over="ignore"):
        lhs = float(np.sum(radial_w[good] * _sphere_sum(w_ang, B(np.abs(vals[sl][good]) * grad_eta))))
    t_hi = 2.0 * float(np.max(np.abs(vals[sl]), initial=1.0)) / width
    if kappa is None:
        kappa = calibrate_sphere_kappa(A, n, regime).kappa
    if regime == "subcritical":
        An1 = sobolev_conjugate(A, n - 1).result
        L = _domination_factor(An1, B, t_hi) if L is None else float(L)
        lam = 2 * L * 4 ** (1 / (n - 1))
        arg = lam * kappa * F ** (1 / (n - 1)) / (width ** (n / (n - 1)) * rho)
        bound = float(phi_q(q, arg)) * 4 * F
        c = 4 * lam ** q
    else:
        if not q > n - 1:
            raise ValueError("the supercritical bound needs q > n - 1")
        # B <= L t^q is only used at the arguments 2|u|/(sigma - rho)
        args = 2.0 * np.abs(vals[sl][good]).ravel() / width
        L = _power_factor(B, q, args) if L is None else float(L)
        c = L * 2 ** q * 4 ** (q / (n - 1)) * sphere_area(n)
        bound = (c * kappa ** q * F ** (q / (n - 1))
                 / (width ** (q - 1 + q / (n - 1)) * rho ** (q - (n - 1))))
    return CutoffResult(edges, eta, good, measure_U, grad_eta, F, lhs, float(bound),
                        float(kappa), float(L), float(c), regime)


# ---------------------------------------------------------------------------
# hole filling

def hole_filling_constant(alpha: float, theta: float):
    """``c(alpha, theta)`` and the ratio ``lam`` of the dyadic radii.

    With ``r_i = r + (1 - lam) lam^i (s - r)`` and ``lam^alpha > theta`` the
    iteration gives ``c = max((1-lam)^-alpha / (1 - theta lam^-alpha), 1/(1-theta))``;
    ``lam`` minimizes that expression.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if not 0 <= theta < 1:
        raise ValueError("theta must lie in [0, 1)")
    lo = theta ** (1 / alpha)

    def geo(lam):
        return (1 - lam) ** -alpha / (1 - theta * lam ** -alpha)

    if theta == 0:
        return 1.0, 0.0
    res = minimize_scalar(lambda x: math.log(geo(x)), bounds=(lo, 1.0), method="bounded",
                          options={"xatol": 1e-12})
    lam = float(res.x)
    return max(geo(lam), 1 / (1 - theta)), lam


@dataclass
class HoleFilling:
    c: float
    lam: float
    bound: Callable = field(repr=False)
    hypothesis_ok: bool
    conclusion_ok: bool
    witness: Optional[tuple] = None


def hole_filling(Z: Callable, theta: float, a: float, b: float, alpha: float,
                 rho: float, sigma: float, points: int = 1000) -> HoleFilling:
    """Check ``Z(r) <= theta Z(s) + a (s-r)^-alpha + b`` on grid pairs and the
    resulting ``Z(r) <= c (a (s-r)^-alpha + b)``.

    ``witness`` is the first failing pair ``(r, s)`` of the hypothesis, or of
    the conclusion when the hypothesis holds.
    """
    if not (a >= 0 and b >= 0):
        raise ValueError("a and b must be nonnegative")
    c, lam = hole_filling_constant(alpha, theta)

    def bound(r, s):
        return c * (a * (np.asarray(s) - np.asarray(r)) ** -alpha + b)

    x = np.linspace(rho, sigma, points)
    z = np.asarray(Z(x), dtype=float)
    ri, si = np.triu_indices(points, k=1)
    d = x[si] - x[ri]
    tail = a * d ** -alpha + b
    tol = 1e-12 * (1 + np.abs(z[ri]))
    hyp = z[ri] <= theta * z[si] + tail + tol
    if not np.all(hyp):
        j = int(np.flatnonzero(~hyp)[0])
        return HoleFilling(c, lam, bound, False, False, (float(x[ri[j]]), float(x[si[j]])))
    concl = z[ri] <= c * tail + tol
    witness = None
    if not np.all(concl):
        j = int(np.flatnonzero(~concl)[0])
        witness = (float(x[ri[j]]), float(x[si[j]]))
    return HoleFilling(c, lam, bound, True, witness is None, witness)


# ---------------------------------------------------------------------------
# iteration

def schedule(K: float, steps: int):
    """``k_l = K (1 - 2^-(l+1))`` and ``sigma_l = 1/2 + 2^-(l+2)`` for ``l = 0..steps``."""
    ell = np.arange(steps + 1, dtype=float)
    return K * (1 - 2.0 ** -(ell + 1)), 0.5 + 2.0 ** -(ell + 2)


@dataclass
class IterationTrace:
    K: float
    n: int
    q: float
    L: float
    c2: float
    c_B: float
    gamma: float
    tau: float
    eps0: float
    eps0_uncorrected: float
    levels: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    log_J: np.ndarray = field(repr=False)
    verdict: str = "decayed"
    witness: Optional[int] = None
    overflow_at: Optional[int] = None
    source: str = "recurrence"

    @property
    def schedule(self):
        return list(zip(self.levels.tolist(), self.radii.tolist()))

    @property
    def J_values(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_J)

    @property
    def J0(self) -> float:
        return float(self.J_values[0])

    def envelope(self) -> np.ndarray:
        """``tau^l J_0``."""
        ell = np.arange(len(self.log_J))
        with np.errstate(over="ignore", divide="ignore"):
            return np.exp(ell * math.log(self.tau) + self.log_J[0])

    def rows(self):
        env = self.envelope()
        J = self.J_values
        for i, (k, s) in enumerate(zip(self.levels, self.radii)):
            yield i, float(k), float(s), float(J[i]), float(env[i])


def _constants(n, q, L, c2, c_B):
    if int(n) != n or n < 2:
        raise ValueError("n must be an integer >= 2")
    if not (c2 >= 1 and q > 1 and L >= 1 and c_B >= 1):
        raise ValueError("need c2 >= 1, q > 1, L >= 1, c_B >= 1")
    gamma = max(q * n / (n - 1), math.log2(L))
    log_tau = -n * (math.log(c2) + gamma * math.log(2))
    log_eps_b = -n * math.log(c_B * L)
    # the step l = 0 -> 1 needs c2 J0^(1/n) <= tau as well
    log_eps0 = min(log_eps_b, n * (log_tau - math.log(c2)))
    log_eps0_uncorrected = min(log_eps_b, n * log_tau)
    return gamma, log_tau, log_eps0, log_eps0_uncorrected


def _decay_check(log_J, log_tau, dev=None):
    """Compare ``log J_l`` with ``l log tau + log J_0``; ``dev`` is the precomputed
    difference when the caller has it in exact form."""
    if np.isneginf(log_J[0]):
        bad = ~np.isneginf(log_J)
    else:
        env = np.arange(len(log_J)) * log_tau + log_J[0]
        if dev is None:
            dev = log_J - env
        bad = dev > LOG_RTOL * np.maximum(1.0, np.abs(env))
    idx = np.flatnonzero(bad)
    return ("decayed", None) if idx.size == 0 else ("stalled", int(idx[0]))


def _overflow(log_J):
    big = np.flatnonzero(log_J > math.log(np.finfo(float).max))
    return int(big[0]) if big.size else None


def iterate(J0: float, n: int, q: float, L: float = 1.0, c2: float = 1.0, K: float = 1.0,
            steps: int = 60, c_B: float = 1.0) -> IterationTrace:
    """Evolve ``J_(l+1) = c2 2^(gamma l) J_l^(1 + 1/n)`` in log space and test
    ``J_l <= tau^l J_0``.

    ``eps0`` is the smallness threshold under which decay is guaranteed;
    ``eps0_uncorrected = min((c_B L)^-n, tau^n)`` is kept for comparison and is
    larger than ``eps0`` whenever ``c2 > 1``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if not J0 >= 0:
        raise ValueError("J0 must be nonnegative")
    gamma, log_tau, log_eps0, log_eps0_uncorrected = _constants(n, q, L, c2, c_B)
    a = math.log(c2)
    ell = np.arange(steps + 1)
    if J0 > 0:
        # x_l = log J_l - (l log tau + log J_0) obeys x_(l+1) = (1 + 1/n) x_l - a l + delta / n
        # because n (a + gamma log 2) + log tau = 0; evolving x keeps the equality
        # case J_0 = eps0 free of amplified rounding
        delta = math.log(J0) - math.log(math.exp(n * (log_tau - a)))
        dev = np.zeros(steps + 1)
        for i in range(steps):
            dev[i + 1] = (1 + 1 / n) * dev[i] - a * i + delta / n
        log_J = dev + ell * log_tau + math.log(J0)
    else:
        dev = None
        log_J = np.full(steps + 1, -math.inf)
    verdict, witness = _decay_check(log_J, log_tau, dev)
    k, s = schedule(K, steps)
    return IterationTrace(float(K), int(n), float(q), float(L), float(c2), float(c_B), gamma,
                          math.exp(log_tau), math.exp(log_eps0), math.exp(log_eps0_uncorrected),
                          k, s, log_J, verdict, witness, _overflow(log_J))


def iterate_field(u: SampledFunction, A: YoungFunction, K: float, q: float, L: float = 1.0,
                  c2: float = 1.0, steps: int = 20, c_B: float = 1.0) -> IterationTrace:
    """The same decay test with ``J_l = J(k_l, sigma_l)`` measured on ``u``."""
    n = u.n
    gamma, log_tau, log_eps0, log_eps0_uncorrected = _constants(n, q, L, c2, c_B)
    k, s = schedule(K, steps)
    J = np.array([level_energy(u, A, kk, ss).value for kk, ss in zip(k, s)])
    with np.errstate(divide="ignore"):
        log_J = np.log(J)
    verdict, witness = _decay_check(log_J, log_tau)
    return IterationTrace(float(K), int(n), float(q), float(L), float(c2), float(c_B), gamma,
                          math.exp(log_tau), math.exp(log_eps0), math.exp(log_eps0_uncorrected),
                          k, s, log_J, verdict, witness, None, "field")


def write_trace_csv(trace: IterationTrace, path) -> Path:
    """Columns ``ell, k_ell, sigma_ell, J_ell, tau_ell_J0``."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ell", "k_ell", "sigma_ell", "J_ell", "tau_ell_J0"])
        for row in trace.rows():
            w.writerow([row[0], *(repr(float(x)) for x in row[1:])])
    return path


# ---------------------------------------------------------------------------
# sup bound

class SupBoundError(ArithmeticError):
    pass


SUP_MODULAR_TOL = 1e-12


def sup_bound_from_trace(u: SampledFunction, A: YoungFunction, trace: IterationTrace,
                         max_doublings: int = 60, details: bool = False):
    """First ``K = 2^j`` with ``int_{B_1/2} A((u - K)_+) <= 1e-12``.

    Alongside, the doubling records the first ``K`` whose start energy
    ``J(K/2, 3/4)`` is below ``trace.eps0`` and whether the level-energy
    iteration from that ``K`` decays.
    """
    if trace.verdict != "decayed":
        raise SupBoundError("the trace did not decay; no bound can be read off")
    w = _ball_weights(u.grid, 0.5)
    K_mod = K_small = None
    field_verdict = None
    for j in range(max_doublings + 1):
        K = 2.0 ** j
        if K_mod is None:
            with np.errstate(over="ignore"):
                m = float(np.sum(w * A(np.maximum(u.values - K, 0.0))))
            if m <= SUP_MODULAR_TOL:
                K_mod = K
        if K_small is None and level_energy(u, A, K / 2, 0.75).value <= trace.eps0:
            K_small = K
            field_verdict = iterate_field(u, A, K, trace.q, trace.L, trace.c2,
                                          c_B=trace.c_B).verdict
        if K_mod is not None and (K_small is not None or not details):
            break
    if K_mod is None:
        raise SupBoundError(f"no K <= 2^{max_doublings} makes the modular of (u - K)_+ vanish")
    if details:
        return {"K": K_mod, "K_smallness": K_small, "field_verdict": field_verdict}
    return K_mod


def two_sided_sup_bound(u: SampledFunction, A: YoungFunction, trace: IterationTrace) -> float:
    """Bound on ``|u|`` in ``B_1/2`` from ``u`` and its reflection ``-u``."""
    return max(sup_bound_from_trace(u, A, trace), sup_bound_from_trace(-u, A, trace))
