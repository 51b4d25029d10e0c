"""Sharp Sobolev conjugates of Young functions.

For a Young function ``A`` and dimension ``n`` the transform

    H_n(s) = (int_0^s (t / A(t))^(1/(n-1)) dt)^((n-1)/n)

is strictly increasing, and ``A_n = A o H_n^{-1}`` is again a Young
function.  Everything here integrates in the variable ``x = log t``, where
the integrands of interest are smooth and close to exponentials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .young import (
    HORIZON,
    BridgeSplice,
    DominationCertificate,
    LinearSplice,
    PiecewiseTable,
    UnboundedInverseError,
    YoungFunction,
    YoungFunctionError,
    check_dominates,
    inverse,
)

__all__ = [
    "PreconditionError",
    "IntegralProfile",
    "SobolevConjugate",
    "LiftedBound",
    "integral_profile",
    "h_n",
    "sobolev_conjugate",
    "regularize_near_zero",
    "lift_global_bound",
    "conjugate_gap_constant",
    "power_floor_constant",
]

# Probe windows are [2^k, 2^(k+1)] for k in WINDOW_EXPONENTS, covering [1e-8, 1e8].
WINDOW_EXPONENTS = np.arange(-27, 27)
QUAD_RTOL = 1e-9
# Exponent tolerance for the convergence dichotomy.
EXPONENT_TOL = 1e-3

_N10, _W10 = np.polynomial.legendre.leggauss(10)
_N20, _W20 = np.polynomial.legendre.leggauss(20)


class PreconditionError(ValueError):
    pass


def _log_weight(A: YoungFunction, m: float, t):
    """``t * (t / A(t))^m``, i.e. the integrand in the variable log t."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = A(t)
        lw = (1.0 + m) * np.log(t) - m * np.log(a)
        out = np.exp(lw)
    out = np.where(a == 0, np.inf, out)
    return np.where(np.isinf(a), 0.0, out)


def _local_exponent(A: YoungFunction, m: float, t):
    """d log W / d log t with W = t (t/A)^m."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        idx = t * A.derivative(t) / A(t)
    return 1.0 + m - m * idx


def _adaptive_gl(fun, xa, xb, rtol=1e-11, max_depth=40):
    """Integrals of ``fun`` over each [xa_i, xb_i] by 10/20-point Gauss-Legendre
    with bisection of windows whose two estimates disagree."""
    xa = np.asarray(xa, dtype=float)
    xb = np.asarray(xb, dtype=float)
    total = np.zeros(xa.shape)
    flagged = np.zeros(xa.shape, dtype=bool)
    idx = np.arange(xa.size)
    a, b = xa.copy(), xb.copy()
    for depth in range(max_depth):
        if idx.size == 0:
            break
        mid = 0.5 * (a + b)
        half = 0.5 * (b - a)
        with np.errstate(invalid="ignore", over="ignore"):
            v20 = (fun(mid[:, None] + half[:, None] * _N20) * _W20).sum(axis=1) * half
            v10 = (fun(mid[:, None] + half[:, None] * _N10) * _W10).sum(axis=1) * half
            err = np.abs(v20 - v10)
        done = ~np.isfinite(v20) | (err <= rtol * np.abs(v20) + 1e-300)
        if depth == max_depth - 1:
            flagged[idx[~done]] = True
            done[:] = True
        np.add.at(total, idx[done], v20[done])
        keep = ~done
        idx = np.concatenate([idx[keep], idx[keep]])
        a, b = (np.concatenate([a[keep], mid[keep]]),
                np.concatenate([mid[keep], b[keep]]))
    return total, flagged


def _zero_tail(A, m, t_lo):
    """int_0^t_lo (t/A)^m dt by the power-law extrapolation W(t_lo) / e0."""
    e0 = float(_local_exponent(A, m, t_lo))
    w = float(_log_weight(A, m, t_lo))
    if not e0 > EXPONENT_TOL:
        return math.inf
    return w / e0


def _cumulative_integral(A, m, s, t_lo=1e-12):
    """``int_0^{s_i} (t/A)^m dt`` for ascending positive ``s``."""
    s = np.asarray(s, dtype=float)
    below = s <= t_lo
    out = np.empty_like(s)
    for i in np.flatnonzero(below):
        out[i] = _zero_tail(A, m, s[i])
    hi = s[~below]
    if hi.size:
        edges = np.concatenate([[t_lo], hi])
        x = np.log(edges)

        def fun(xx):
            return _log_weight(A, m, np.exp(xx))

        pieces, _ = _adaptive_gl(fun, x[:-1], x[1:])
        out[~below] = _zero_tail(A, m, t_lo) + np.cumsum(pieces)
    return out


# ---------------------------------------------------------------------------
# convergence profile

@dataclass(frozen=True, eq=False)
class IntegralProfile:
    """Convergence diagnostics for ``int (t/A(t))^m dt`` at 0 and at infinity.

    ``partial_values`` rows are ``(a, b, int_a^b)`` over the nested windows
    ``[2^-j, 2^j]``.  The classification fits ``W(t) ~ t^e |log t|^beta``
    to the integrand in log variables at two scales on each side: the
    integral converges iff ``e`` is on the decaying side, or ``e`` is
    negligible and ``beta < -1``.
    """

    exponent_m: float
    at_zero: str
    at_infinity: str
    partial_values: np.ndarray = field(repr=False)
    window_values: np.ndarray = field(repr=False)
    flagged_windows: tuple = ()
    zero_fit: tuple = (0.0, 0.0)
    infinity_fit: tuple = (0.0, 0.0)


def _karamata_fit(A, m, t1, t2):
    """Solve e + beta/|log t| = local exponent at two scales."""
    e1, e2 = (float(v) for v in _local_exponent(A, m, np.array([t1, t2])))
    l1, l2 = abs(math.log(t1)), abs(math.log(t2))
    if not (np.isfinite(e1) and np.isfinite(e2)):
        return (math.nan, math.nan)
    beta = (e1 - e2) / (1 / l1 - 1 / l2)
    return (e2 - beta / l2, beta)


def _classify(e, beta, side):
    # side = +1 at infinity (need decay), -1 at zero (need growth)
    if not np.isfinite(e):
        return "diverges"
    se = side * e
    if se < -EXPONENT_TOL:
        return "converges"
    if se > EXPONENT_TOL:
        return "diverges"
    return "converges" if beta < -1 - 0.05 else "diverges"


@lru_cache(maxsize=256)
def _profile_cached(A, m):
    edges = np.ldexp(1.0, np.append(WINDOW_EXPONENTS, WINDOW_EXPONENTS[-1] + 1))
    vals = np.empty(len(edges) - 1)
    flagged = []

    def w(x):
        return float(_log_weight(A, m, math.exp(x)))

    for i in range(len(vals)):
        xa, xb = math.log(edges[i]), math.log(edges[i + 1])
        ends = _log_weight(A, m, np.array([edges[i], edges[i + 1]]))
        if not np.all(np.isfinite(ends)):
            # overflow or A = 0 inside the window: clip it
            vals[i] = math.inf
            flagged.append((float(edges[i]), float(edges[i + 1])))
            continue
        with np.errstate(all="ignore"):
            v, _ = integrate.quad(w, xa, xb, epsrel=QUAD_RTOL, epsabs=0.0, limit=200)
        vals[i] = v
    mid = len(vals) // 2   # window [1, 2]
    rows = []
    for j in range(1, mid + 1):
        lo, hi = mid - j, mid + j
        rows.append((edges[lo], edges[hi], float(np.sum(vals[lo:hi]))))
    partial = np.array(rows)
    zfit = _karamata_fit(A, m, 1e-6, 1e-8)
    ifit = _karamata_fit(A, m, HORIZON / 100, HORIZON)
    at_zero = _classify(*zfit, side=-1)
    at_inf = _classify(*ifit, side=+1)
    if any(b <= 2 ** WINDOW_EXPONENTS[0] * 2 for b, _ in flagged):
        at_zero = "diverges"
    return IntegralProfile(float(m), at_zero, at_inf, partial, vals, tuple(flagged), zfit, ifit)


def integral_profile(A: YoungFunction, m: float) -> IntegralProfile:
    """Classify ``int (t/A(t))^m dt`` at both endpoints; quadrature per doubling window."""
    if not m > 0:
        raise YoungFunctionError("exponent m must be positive", "m")
    return _profile_cached(A, float(m))


def _require_conv0(A, n):
    if n < 2 or int(n) != n:
        raise YoungFunctionError(f"dimension must be an integer >= 2, got {n}", "n")
    prof = integral_profile(A, 1.0 / (n - 1))
    if prof.at_zero != "converges":
        raise PreconditionError(
            f"int_0 (t/A)^(1/{n - 1}) dt diverges; apply regularize_near_zero first")
    return prof


def h_n(A: YoungFunction, n: int, s):
    """``H_n(s)``; requires the integral at zero to converge."""
    _require_conv0(A, n)
    arr = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(arr < 0):
        raise YoungFunctionError("s must be nonnegative", "s")
    out = np.zeros_like(arr)
    pos = arr > 0
    if pos.any():
        order = np.argsort(arr[pos])
        vals = np.empty(order.size)
        vals[order] = _cumulative_integral(A, 1.0 / (n - 1), arr[pos][order])
        out[pos] = vals ** ((n - 1) / n)
    return float(out[0]) if np.ndim(s) == 0 else out


# ---------------------------------------------------------------------------
# the conjugate table

@dataclass(frozen=True, eq=False)
class SobolevConjugate:
    base: YoungFunction
    dim: int
    s: np.ndarray = field(repr=False)
    h: np.ndarray = field(repr=False)
    result: PiecewiseTable = field(repr=False)

    @property
    def h_table(self):
        return np.column_stack([self.s, self.h])

    def __call__(self, t):
        return self.result(t)

    def h_of(self, s):
        return h_n(self.base, self.dim, s)

    def h_inverse(self, t):
        """``H_n^{-1}`` by log-log monotone cubic interpolation of the table,
        falling back to bisection outside it."""
        arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.zeros_like(arr)
        lo, hi = self.h[0], self.h[-1]
        inside = (arr >= lo) & (arr <= hi)
        if inside.any():
            out[inside] = np.exp(self._pchip(np.log(arr[inside])))
        for i in np.flatnonzero(~inside & (arr > 0)):
            out[i] = _bisect_h(self, arr[i])
        return float(out[0]) if np.ndim(t) == 0 else out

    @property
    def _pchip(self):
        cache = self.__dict__.setdefault("_cache", {})
        if "pchip" not in cache:
            cache["pchip"] = PchipInterpolator(np.log(self.h), np.log(self.s))
        return cache["pchip"]


def _bisect_h(sc, t):
    lo, hi = 0.0, 1.0
    while sc.h_of(hi) <= t:
        lo, hi = hi, hi * 2
        if hi > 1e300:
            raise UnboundedInverseError(t, hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if sc.h_of(mid) > t:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-14 * hi:
            break
    return hi


S_MIN = 1e-12
S_MAX = 1e150
VALUE_CAP = 1e250
PER_DECADE = 40


@lru_cache(maxsize=64)
def _sobolev_cached(A, n):
    _require_conv0(A, n)
    m = 1.0 / (n - 1)
    try:
        s_top = min(S_MAX, inverse(A, VALUE_CAP), A.domain_end)
    except UnboundedInverseError:
        s_top = min(S_MAX, A.domain_end)
    decades = math.log10(s_top) - math.log10(S_MIN)
    s = np.logspace(math.log10(S_MIN), math.log10(s_top), int(decades * PER_DECADE) + 1)
    kinks = [k for k in A.kinks() if S_MIN < k < s_top]
    s = np.unique(np.concatenate([s, kinks]))
    integral = _cumulative_integral(A, m, s)
    h = integral ** ((n - 1) / n)
    vals = A(s)
    with np.errstate(over="ignore", invalid="ignore"):
        slopes = A.derivative(s) * (n / (n - 1)) * integral ** (1 / n) * (vals / s) ** m
    ok = np.isfinite(h) & np.isfinite(vals) & np.isfinite(slopes) & (vals > 0)
    ok &= np.concatenate([[True], np.diff(h) > 0])
    s, h, vals, slopes = s[ok], h[ok], vals[ok], slopes[ok]
    table = PiecewiseTable(np.column_stack([h, vals, slopes]), finite_domain=True)
    table.meta.update({"source": "sobolev_conjugate", "dim": n, "s_max": float(s[-1])})
    return SobolevConjugate(A, n, s, h, table)


def sobolev_conjugate(A: YoungFunction, n: int) -> SobolevConjugate:
    """Tabulate ``A_n = A o H_n^{-1}``.

    The table is flagged ``finite_domain``: past ``H_n`` of the largest
    tabulated ``s`` (where ``A`` reaches ~1e250 or ``s`` reaches 1e150) it
    evaluates to ``inf``.
    """
    return _sobolev_cached(A, int(n))


# ---------------------------------------------------------------------------
# regularization near zero and the global lift

def regularize_near_zero(A: YoungFunction, n: int = 2, t1: Optional[float] = None,
                         thresholds: Sequence[float] = ()) -> LinearSplice:
    """Replace ``A`` by its chord ``a t`` below ``t1 = max(1, thresholds)``.

    The result dominates ``A``, is at least ``a t`` everywhere, and makes
    every ``int_0 (t/A)^m`` converge.
    """
    if t1 is None:
        t1 = max([1.0, *[float(x) for x in thresholds]])
    if not t1 > 0:
        raise YoungFunctionError("splice point must be positive", "t1")
    if not A(t1) > 0:
        raise YoungFunctionError(f"degenerate splice: A vanishes at t1={t1}", "t1")
    return LinearSplice(float(t1), A)


def power_floor_constant(A_hat: YoungFunction, n: int, t_max: float = 1e4, max_k: int = 40):
    """Smallest ``2^k`` with ``t^(n/(n-1)) <= 2^k A_hat_n(t)`` on log probes up to ``t_max``."""
    An = sobolev_conjugate(A_hat, n).result
    t = np.logspace(-8, math.log10(t_max), 600)
    lhs = t ** (n / (n - 1))
    rhs = An(t)
    for k in range(max_k + 1):
        if np.all(lhs <= 2.0 ** k * rhs * (1 + 1e-9)):
            return 2.0 ** k
    return None


def conjugate_gap_constant(A: YoungFunction, An: YoungFunction, k: float,
                     horizon: float = HORIZON):
    """``c = max_t (A(t) - A_n(k t))_+`` over log probes.

    Returns ``(c, attained_interior)``; the second flag is False when the
    maximum sits at the horizon, i.e. ``A_n(k .)`` has not yet overtaken ``A``.
    """
    t = np.concatenate([[0.0], np.logspace(-8, math.log10(horizon), 801)])
    t = t[np.isfinite(A(t))]
    with np.errstate(invalid="ignore"):
        diff = A(t) - An(k * t)
    diff = np.where(np.isnan(diff), -np.inf, diff)
    i = int(np.argmax(diff))
    c = max(0.0, float(diff[i]))
    if 0 < i < len(t) - 1 and np.isfinite(c) and c > 0:
        # polish the probe maximum between its neighbours
        lo, hi = math.log(max(t[i - 1], 1e-300)), math.log(t[i + 1])
        res = optimize.minimize_scalar(lambda x: -float(A(math.exp(x)) - An(k * math.exp(x))),
                                       bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        if np.isfinite(res.fun):
            c = max(c, -float(res.fun))
    return c, bool(np.isfinite(c) and (i < len(t) - 1 or c == 0.0))


@dataclass(frozen=True)
class LiftedBound:
    function: BridgeSplice
    t2: float
    t3: float
    L_hat: float
    L_hat_scaling: float
    convex_bridge: bool
    certificate: Optional[DominationCertificate] = field(default=None, repr=False)


def lift_global_bound(B: YoungFunction, target: YoungFunction, L: float, t0: float,
                      horizon: float = HORIZON) -> LiftedBound:
    """Splice ``B`` with ``target`` near zero so that ``B_hat(t) <= target(L_hat t)``
    for every ``t >= 0``.

    ``B_hat`` is ``target`` on ``[0, t2)``, a chord on ``[t2, t3)`` and ``B``
    beyond ``t3``; ``t2, t3`` are the smallest powers of two meeting the
    construction's requirements.  Needs ``B(t) <= target(L t)`` for
    ``t >= t0`` on the probe grid.
    """
    probes = np.logspace(math.log10(max(t0, 1e-6)), math.log10(horizon), 400)
    if not np.all(B(probes) <= target(L * probes) * (1 + 1e-12)):
        raise PreconditionError(
            f"B(t) <= target({L} t) fails on [{t0}, {horizon:.3g}]; no near-infinity certificate")
    t2 = 2.0 ** math.ceil(math.log2(max(1.0, t0)))
    lo_slope = float(target.derivative(t2 * (1 - 1e-12)))
    chosen, convex = None, False
    t3 = 2 * t2
    first_monotone = None
    while t3 <= horizon:
        if B(t3) > target(t2):
            first_monotone = first_monotone or t3
            slope = (B(t3) - target(t2)) / (t3 - t2)
            if lo_slope <= slope <= B.derivative(t3):
                chosen, convex = t3, True
                break
        t3 *= 2
    if chosen is None:
        if first_monotone is None:
            raise PreconditionError("B never exceeds target(t2) below the horizon")
        chosen = first_monotone
    bhat = BridgeSplice(target, B, float(t2), float(chosen))
    scaling = max(1.0, L * chosen / t2)
    cert = check_dominates(target, bhat, "global", horizon)
    L_hat = cert.c if cert is not None else scaling
    return LiftedBound(bhat, float(t2), float(chosen), float(L_hat), float(scaling), convex, cert)
