"""Young functions and their one-variable convex calculus.

A Young function is convex, nondecreasing and vanishes at 0.  Every kind
here evaluates vectorized over numpy arrays and exposes a right derivative,
so inverses, conjugates and growth indices are computed the same way for
analytic and tabulated profiles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "HORIZON",
    "YoungFunctionError",
    "UnboundedInverseError",
    "YoungFunction",
    "Power",
    "PowerLog",
    "ExpPoly",
    "LinearSplice",
    "PiecewiseTable",
    "Scaled",
    "BridgeSplice",
    "DominationCertificate",
    "DominationSearch",
    "domination_search",
    "tail_index",
    "power",
    "power_log",
    "exp_poly",
    "linear_splice",
    "piecewise_table",
    "scaled",
    "inverse",
    "conjugate",
    "delta2_index",
    "check_dominates",
    "phi_q",
    "from_dict",
    "parse_spec",
    "validate",
]

# "Near infinity" means the window [t0, HORIZON].
HORIZON = 1e8
# Largest argument the inverse bracket will try (2**500).
INVERSE_EXPONENTS = np.arange(-300, 501)

_PROBES_PER_DECADE = 50


class YoungFunctionError(ValueError):
    """Invalid Young function or argument outside its domain."""

    def __init__(self, message, field=None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class UnboundedInverseError(ArithmeticError):
    def __init__(self, s, horizon):
        super().__init__(
            f"level {s!r} is not reached below the numeric horizon {horizon:.3g}")
        self.level = s
        self.horizon = horizon


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise YoungFunctionError("argument must be nonnegative and finite")
    return arr


def _wrap(result, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


class YoungFunction:
    """Base class.  Subclasses implement ``_eval`` and ``_deriv`` on arrays."""

    kind = "abstract"

    #: True when the analytic form only holds beyond ``splice``.
    near_infinity = False
    splice: Optional[float] = None

    def __call__(self, t):
        arr = _as_array(t)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._eval(arr)
        return _wrap(out, t)

    def derivative(self, t):
        """Right derivative."""
        arr = _as_array(t)
        with np.errstate(over="ignore", invalid="ignore"):
            out = self._deriv(arr)
        return _wrap(out, t)

    def kinks(self) -> list[float]:
        """Points where the right derivative jumps."""
        return []

    @property
    def domain_end(self) -> float:
        """Supremum of the set where the function is finite."""
        return math.inf

    def to_dict(self) -> dict:
        raise NotImplementedError

    def _eval(self, t):
        raise NotImplementedError

    def _deriv(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class Power(YoungFunction):
    p: float
    kind = "power"

    def __post_init__(self):
        if not self.p >= 1:
            raise YoungFunctionError(f"exponent must be >= 1, got {self.p}", "p")

    def _eval(self, t):
        return t ** self.p

    def _deriv(self, t):
        if self.p == 1:
            return np.ones_like(t)
        return self.p * t ** (self.p - 1)

    def to_dict(self):
        return {"kind": "power", "p": self.p}


def _power_log_splice(p, alpha):
    # Smallest log t >= 1 past which t^p (log t)^alpha is convex and the
    # linear continuation a*t stays below it.
    cands = [1.0]
    if p > 1:
        a2, a1, a0 = p * (p - 1), alpha * (2 * p - 1), alpha * (alpha - 1)
        disc = a1 * a1 - 4 * a2 * a0
        if disc >= 0:
            cands.append((-a1 + math.sqrt(disc)) / (2 * a2))
        cands.append(-alpha / (p - 1))
    else:
        cands.append(1.0 - alpha)
    return math.exp(max(cands))


@dataclass(frozen=True)
class PowerLog(YoungFunction):
    """``t^p (log t)^alpha`` beyond a splice point, linear below it."""

    p: float
    alpha: float
    splice: Optional[float] = None
    kind = "power_log"
    near_infinity = True

    def __post_init__(self):
        if not self.p >= 1:
            raise YoungFunctionError(f"exponent must be >= 1, got {self.p}", "p")
        if self.p == 1 and self.alpha < 0:
            raise YoungFunctionError("p = 1 requires alpha >= 0", "alpha")
        ts = _power_log_splice(self.p, self.alpha) if self.splice is None else self.splice
        if ts <= 1:
            raise YoungFunctionError("splice point must exceed 1", "splice")
        object.__setattr__(self, "splice", float(ts))

    @property
    def slope0(self):
        ts = self.splice
        return ts ** (self.p - 1) * math.log(ts) ** self.alpha

    def _eval(self, t):
        ts = self.splice
        hi = np.maximum(t, ts)
        lg = np.log(hi)
        out = hi ** self.p * lg ** self.alpha
        return np.where(t < ts, self.slope0 * t, out)

    def _deriv(self, t):
        ts = self.splice
        hi = np.maximum(t, ts)
        lg = np.log(hi)
        d = hi ** (self.p - 1) * lg ** (self.alpha - 1) * (self.p * lg + self.alpha)
        return np.where(t < ts, self.slope0, d)

    def kinks(self):
        return [self.splice]

    def to_dict(self):
        return {"kind": "power_log", "p": self.p, "alpha": self.alpha,
                "splice": self.splice}


@dataclass(frozen=True)
class ExpPoly(YoungFunction):
    """``exp(t^a) - 1``."""

    a: float
    kind = "exp_poly"

    def __post_init__(self):
        if not self.a >= 1:
            raise YoungFunctionError(f"exp(t^a)-1 is convex only for a >= 1, got {self.a}", "a")

    def _eval(self, t):
        return np.expm1(t ** self.a)

    def _deriv(self, t):
        if self.a == 1:
            return np.exp(t)
        return self.a * t ** (self.a - 1) * np.exp(t ** self.a)

    def to_dict(self):
        return {"kind": "exp_poly", "a": self.a}


@dataclass(frozen=True)
class LinearSplice(YoungFunction):
    """``a*t`` on ``[0, t1)`` with ``a = base(t1)/t1``, ``base`` beyond."""

    t1: float
    base: YoungFunction
    kind = "linear_splice"

    def __post_init__(self):
        if not self.t1 > 0:
            raise YoungFunctionError("splice point must be positive", "t1")

    @property
    def splice(self):
        return self.t1

    @property
    def slope0(self):
        return self.base(self.t1) / self.t1

    def _eval(self, t):
        return np.where(t < self.t1, self.slope0 * t, self.base._eval(t))

    def _deriv(self, t):
        return np.where(t < self.t1, self.slope0, self.base._deriv(t))

    def kinks(self):
        return [self.t1] + [k for k in self.base.kinks() if k > self.t1]

    @property
    def domain_end(self):
        return self.base.domain_end

    def to_dict(self):
        return {"kind": "linear_splice", "t1": self.t1, "base": self.base.to_dict()}


@dataclass(frozen=True)
class Scaled(YoungFunction):
    """``lambda_val * inner(lambda_arg * t)``."""

    inner: YoungFunction
    lambda_arg: float = 1.0
    lambda_val: float = 1.0
    kind = "scaled"

    def __post_init__(self):
        if not (self.lambda_arg > 0 and self.lambda_val > 0):
            raise YoungFunctionError("scale factors must be positive", "lambda_arg/lambda_val")

    def _eval(self, t):
        return self.lambda_val * self.inner._eval(self.lambda_arg * t)

    def _deriv(self, t):
        return self.lambda_val * self.lambda_arg * self.inner._deriv(self.lambda_arg * t)

    def kinks(self):
        return [k / self.lambda_arg for k in self.inner.kinks()]

    @property
    def domain_end(self):
        return self.inner.domain_end / self.lambda_arg

    def to_dict(self):
        return {"kind": "scaled", "inner": self.inner.to_dict(),
                "lambda_arg": self.lambda_arg, "lambda_val": self.lambda_val}


@dataclass(frozen=True, eq=False)
class PiecewiseTable(YoungFunction):
    """Convex table of ``(t, value, right_slope)`` knots.

    Between knots the cubic Hermite interpolant is used when it is convex
    for the segment data; otherwise the chord.  Past the last knot the
    table continues with its last slope, or is ``+inf`` when
    ``finite_domain`` is set.
    """

    knots: np.ndarray
    finite_domain: bool = False
    meta: dict = field(default_factory=dict, compare=False)
    kind = "piecewise_table"

    def __post_init__(self):
        k = np.array(self.knots, dtype=float)
        if k.ndim != 2 or k.shape[1] != 3 or len(k) < 1:
            raise YoungFunctionError("knots must be a list of (t, value, slope) triples", "knots")
        t, v, s = k.T
        if t[0] < 0:
            raise YoungFunctionError("knot abscissae must be nonnegative", "knots[0]")
        if t[0] == 0 and v[0] != 0:
            raise YoungFunctionError("value at t = 0 must be 0", "knots[0]")
        if t[0] > 0:
            k = np.vstack([[0.0, 0.0, min(v[0] / t[0], s[0])], k])
            t, v, s = k.T
        bad = np.flatnonzero(np.diff(t) <= 0)
        if bad.size:
            raise YoungFunctionError("knot abscissae must be strictly ascending",
                                     f"knots[{bad[0] + 1}]")
        object.__setattr__(self, "knots", k)
        h = np.diff(t)
        m = np.diff(v) / h
        sa, sb = s[:-1], s[1:]
        slack = 1e-9 * (np.abs(sa) + np.abs(sb)) + 1e-300
        herm = (6 * m >= 4 * sa + 2 * sb - 6 * slack) & (6 * m <= 4 * sb + 2 * sa + 6 * slack)
        object.__setattr__(self, "_h", h)
        object.__setattr__(self, "_m", m)
        object.__setattr__(self, "_herm", herm)

    def __repr__(self):
        t = self.knots[:, 0]
        return (f"PiecewiseTable({len(t)} knots on [{t[0]:.3g}, {t[-1]:.3g}], "
                f"finite_domain={self.finite_domain})")

    @property
    def t(self):
        return self.knots[:, 0]

    @property
    def values(self):
        return self.knots[:, 1]

    @property
    def slopes(self):
        return self.knots[:, 2]

    @property
    def domain_end(self):
        return float(self.t[-1]) if self.finite_domain else math.inf

    def _locate(self, x):
        t = self.t
        i = np.clip(np.searchsorted(t, x, side="right") - 1, 0, max(len(t) - 2, 0))
        return i

    def _eval(self, x):
        t, v, s = self.knots.T
        if len(t) == 1:
            out = v[0] + s[0] * (x - t[0])
        else:
            i = self._locate(x)
            h = self._h[i]
            u = (x - t[i]) / h
            u2, u3 = u * u, u * u * u
            cubic = ((2 * u3 - 3 * u2 + 1) * v[i] + (u3 - 2 * u2 + u) * h * s[i]
                     + (-2 * u3 + 3 * u2) * v[i + 1] + (u3 - u2) * h * s[i + 1])
            chord = v[i] + self._m[i] * (x - t[i])
            out = np.where(self._herm[i], cubic, chord)
        last = x > t[-1]
        tail = np.inf if self.finite_domain else v[-1] + s[-1] * (x - t[-1])
        return np.maximum(np.where(last, tail, out), 0.0)

    def _deriv(self, x):
        t, v, s = self.knots.T
        if len(t) == 1:
            out = np.full_like(x, s[0])
        else:
            i = self._locate(x)
            h = self._h[i]
            u = (x - t[i]) / h
            u2 = u * u
            cubic = ((6 * u2 - 6 * u) * v[i] / h + (3 * u2 - 4 * u + 1) * s[i]
                     + (-6 * u2 + 6 * u) * v[i + 1] / h + (3 * u2 - 2 * u) * s[i + 1])
            out = np.where(self._herm[i], cubic, self._m[i])
        last = x >= t[-1]
        tail = np.inf if self.finite_domain else s[-1]
        return np.where(last, tail, out)

    def kinks(self):
        # chord segments meeting Hermite ones can have slope jumps
        t = self.t
        jumps = np.flatnonzero(~self._herm)
        pts = set(t[jumps].tolist()) | set(t[jumps + 1].tolist())
        return sorted(p for p in pts if p > 0)

    def to_dict(self):
        d = {"kind": "piecewise_table", "knots": self.knots.tolist()}
        if self.finite_domain:
            d["finite_domain"] = True
        return d


@dataclass(frozen=True)
class BridgeSplice(YoungFunction):
    """``lower`` on ``[0, t2)``, linear bridge on ``[t2, t3)``, ``upper`` beyond."""

    lower: YoungFunction
    upper: YoungFunction
    t2: float
    t3: float
    kind = "bridge_splice"

    def __post_init__(self):
        if not 0 < self.t2 < self.t3:
            raise YoungFunctionError("need 0 < t2 < t3", "t2/t3")

    @property
    def bridge_slope(self):
        return (self.upper(self.t3) - self.lower(self.t2)) / (self.t3 - self.t2)

    def _eval(self, t):
        lo = self.lower._eval(np.minimum(t, self.t2))
        hi = self.upper._eval(np.maximum(t, self.t3))
        mid = self.lower(self.t2) + self.bridge_slope * (t - self.t2)
        return np.where(t < self.t2, lo, np.where(t < self.t3, mid, hi))

    def _deriv(self, t):
        lo = self.lower._deriv(np.minimum(t, self.t2))
        hi = self.upper._deriv(np.maximum(t, self.t3))
        return np.where(t < self.t2, lo, np.where(t < self.t3, self.bridge_slope, hi))

    def kinks(self):
        return ([k for k in self.lower.kinks() if k < self.t2] + [self.t2, self.t3]
                + [k for k in self.upper.kinks() if k > self.t3])

    @property
    def domain_end(self):
        return self.upper.domain_end

    def to_dict(self):
        return {"kind": "bridge_splice", "lower": self.lower.to_dict(),
                "upper": self.upper.to_dict(), "t2": self.t2, "t3": self.t3}


def power(p):
    return Power(float(p))


def power_log(p, alpha, splice=None):
    return PowerLog(float(p), float(alpha), splice)


def exp_poly(a):
    return ExpPoly(float(a))


def linear_splice(t1, base):
    return LinearSplice(float(t1), base)


def piecewise_table(knots, finite_domain=False):
    return PiecewiseTable(np.asarray(knots, dtype=float), finite_domain)


def scaled(inner, lambda_arg=1.0, lambda_val=1.0):
    return Scaled(inner, float(lambda_arg), float(lambda_val))


# ---------------------------------------------------------------------------
# ingestion

def from_dict(doc: dict, path: str = "$", check: bool = True) -> YoungFunction:
    """Build a Young function from its document form.

    Raises :class:`YoungFunctionError` naming the offending field when the
    document is malformed or the function fails convexity/monotonicity on
    the validation grid.
    """
    if not isinstance(doc, dict):
        raise YoungFunctionError("expected an object", path)
    kind = doc.get("kind")

    def num(name, default=None):
        if name not in doc:
            if default is not None:
                return default
            raise YoungFunctionError("missing field", f"{path}.{name}")
        try:
            return float(doc[name])
        except (TypeError, ValueError):
            raise YoungFunctionError("expected a number", f"{path}.{name}") from None

    try:
        if kind == "power":
            y = Power(num("p"))
        elif kind == "power_log":
            y = PowerLog(num("p"), num("alpha"), doc.get("splice"))
        elif kind == "exp_poly":
            y = ExpPoly(num("a"))
        elif kind == "linear_splice":
            y = LinearSplice(num("t1"), from_dict(doc.get("base"), f"{path}.base", check=False))
        elif kind == "scaled":
            y = Scaled(from_dict(doc.get("inner"), f"{path}.inner", check=False),
                       num("lambda_arg", 1.0), num("lambda_val", 1.0))
        elif kind == "piecewise_table":
            y = PiecewiseTable(np.asarray(doc.get("knots"), dtype=float),
                               bool(doc.get("finite_domain", False)))
        elif kind == "bridge_splice":
            y = BridgeSplice(from_dict(doc.get("lower"), f"{path}.lower", check=False),
                             from_dict(doc.get("upper"), f"{path}.upper", check=False),
                             num("t2"), num("t3"))
        else:
            raise YoungFunctionError(f"unknown kind {kind!r}", f"{path}.kind")
    except YoungFunctionError as err:
        if err.field and not err.field.startswith("$"):
            raise YoungFunctionError(str(err).split(": ", 1)[-1], f"{path}.{err.field}") from None
        raise
    except (TypeError, ValueError) as err:
        raise YoungFunctionError(str(err), path) from None
    if check:
        validate(y, path)
    return y


def parse_spec(text: str) -> YoungFunction:
    """Shorthand (``power:2.5``, ``powerlog:2:1``, ``exp:1.5``) or JSON text."""
    import json

    text = text.strip()
    if text.startswith("{"):
        return from_dict(json.loads(text))
    head, *args = text.split(":")
    try:
        vals = [float(a) for a in args]
    except ValueError:
        raise YoungFunctionError(f"bad shorthand {text!r}") from None
    head = head.lower()
    if head == "power" and len(vals) == 1:
        doc = {"kind": "power", "p": vals[0]}
    elif head in ("powerlog", "power_log") and len(vals) == 2:
        doc = {"kind": "power_log", "p": vals[0], "alpha": vals[1]}
    elif head in ("exp", "exp_poly") and len(vals) == 1:
        doc = {"kind": "exp_poly", "a": vals[0]}
    else:
        raise YoungFunctionError(f"bad shorthand {text!r}")
    return from_dict(doc)


def validate(y: YoungFunction, path: str = "$", monotone_only: bool = False):
    """Check value at 0, monotonicity and (unless ``monotone_only``) convexity."""
    grid = np.concatenate([[0.0], np.logspace(-6, 8, 14 * 20 + 1)])
    end = y.domain_end
    grid = grid[grid <= end]
    v = y(grid)
    if v[0] != 0:
        raise YoungFunctionError("value at 0 must be 0", path)
    fin = np.isfinite(v)
    if np.any(v[fin] < 0):
        raise YoungFunctionError("values must be nonnegative", path)
    vf = v[fin]
    if np.any(np.diff(vf) < -1e-12 * np.abs(vf[1:])):
        i = int(np.flatnonzero(np.diff(vf) < -1e-12 * np.abs(vf[1:]))[0])
        raise YoungFunctionError(f"not nondecreasing near t={grid[i + 1]:.3g}", path)
    if monotone_only:
        return
    d = y.derivative(grid)
    df = d[np.isfinite(d)]
    drop = np.diff(df) < -1e-9 * np.abs(df[1:]) - 1e-300
    if np.any(drop):
        i = int(np.flatnonzero(drop)[0])
        raise YoungFunctionError(f"not convex near t={grid[i + 1]:.3g}", path)


# ---------------------------------------------------------------------------
# inverses

def _monotone_inverse(f, s):
    """inf{t >= 0 : f(t) > s} for nondecreasing vectorized ``f``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    grid = np.ldexp(1.0, INVERSE_EXPONENTS)
    with np.errstate(over="ignore", invalid="ignore"):
        fg = f(grid)
    fg = np.where(np.isnan(fg), np.inf, fg)
    fg = np.maximum.accumulate(fg)
    j = np.searchsorted(fg, s, side="right")
    if np.any(j >= len(grid)):
        bad = s[j >= len(grid)][0]
        raise UnboundedInverseError(float(bad), float(grid[-1]))
    hi = grid[j]
    lo = np.where(j > 0, grid[np.maximum(j - 1, 0)], 0.0)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        with np.errstate(over="ignore", invalid="ignore"):
            above = f(mid) > s
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    # hi stays on the {f > s} side, so plateaus resolve to their right end
    return hi


def inverse(y: YoungFunction, s):
    """Generalized right-continuous inverse ``inf{t : y(t) > s}``."""
    arr = np.asarray(s, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise YoungFunctionError("level must be nonnegative")
    out = _monotone_inverse(y._eval, arr)
    return float(out[0]) if np.ndim(s) == 0 else out.reshape(np.shape(arr))


# ---------------------------------------------------------------------------
# conjugation

_GOLDEN = (math.sqrt(5) - 1) / 2


def _golden_max(obj, lo, hi, iters=90):
    """Vectorized golden-section maximization; ties keep the left bracket."""
    a, b = lo.copy(), hi.copy()
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = obj(c), obj(d)
    for _ in range(iters):
        left = fc >= fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - _GOLDEN * (b - a), d)
        d_new = np.where(left, c, a + _GOLDEN * (b - a))
        f_probe = obj(np.where(left, c_new, d_new))
        fc, fd = np.where(left, f_probe, fd), np.where(left, fc, f_probe)
        c, d = c_new, d_new
    x = a
    fx = obj(x)
    x = np.where(fx >= obj(b), x, b)
    return x, np.fmax(fx, obj(b))


def conjugate(y: YoungFunction, n_knots: int = 1201, t_min: float = 1e-6,
              t_max: float = 1e6) -> PiecewiseTable:
    """Young conjugate ``sup_tau (tau*t - y(tau))`` as a convex table.

    Knots are log-spaced on ``[t_min, t_max]`` plus the one-sided slopes of
    ``y`` at its kinks, where the conjugate has its own kinks.  When ``y``
    grows linearly near infinity the conjugate is infinite past the largest
    slope; the table is then truncated and flagged ``finite_domain``.
    """
    ts = np.logspace(math.log10(t_min), math.log10(t_max), n_knots)
    extra = []
    for k in y.kinks():
        for side in (k * (1 - 1e-15), k):
            sl = y.derivative(side) if side > 0 else None
            if sl is not None and np.isfinite(sl) and t_min < sl < t_max:
                extra.append(float(sl))
    ts = np.unique(np.concatenate([ts, extra]))

    # largest maximizer = right-continuous inverse of the right derivative
    try:
        tau_star = _monotone_inverse(y._deriv, ts)
        finite = np.ones_like(ts, dtype=bool)
    except UnboundedInverseError:
        top = np.ldexp(1.0, int(INVERSE_EXPONENTS[-1]))
        finite = y._deriv(np.array([top]))[0] > ts
        tau_star = np.full_like(ts, np.nan)
        if finite.any():
            tau_star[finite] = _monotone_inverse(y._deriv, ts[finite])

    # golden-section refinement over a coarse log bracket
    tau_grid = np.concatenate([[0.0], np.logspace(-12, 12, 961)])
    with np.errstate(over="ignore", invalid="ignore"):
        yg = y._eval(tau_grid)
    obj_grid = ts[:, None] * tau_grid[None, :] - yg[None, :]
    obj_grid = np.where(np.isnan(obj_grid), -np.inf, obj_grid)
    jbest = np.argmax(obj_grid, axis=1)
    lo = tau_grid[np.maximum(jbest - 1, 0)]
    hi = tau_grid[np.minimum(jbest + 1, len(tau_grid) - 1)]

    def obj(tau):
        with np.errstate(over="ignore", invalid="ignore"):
            val = ts * tau - y._eval(tau)
        return np.where(np.isnan(val), -np.inf, val)

    _, gval = _golden_max(obj, lo, hi)
    with np.errstate(over="ignore", invalid="ignore"):
        exact = ts * tau_star - y._eval(np.nan_to_num(tau_star))
    vals = np.fmax(np.where(finite, exact, -np.inf), gval)
    vals = np.maximum(vals, 0.0)

    keep = finite & np.isfinite(vals)
    if not keep.all():
        cut = int(np.argmin(keep)) if not keep[0] else int(np.flatnonzero(~keep)[0])
        keep = np.arange(len(ts)) < cut
    knots = np.column_stack([ts[keep], vals[keep], tau_star[keep]])
    # monotone/convex cleanup of round-off
    knots[:, 1] = np.maximum.accumulate(knots[:, 1])
    knots[:, 2] = np.maximum.accumulate(knots[:, 2])
    table = PiecewiseTable(knots, finite_domain=not finite.all())
    table.meta.update({"source": "conjugate", "t_min": t_min, "t_max": t_max})
    return table


# ---------------------------------------------------------------------------
# growth diagnostics

def _probe_grid(lo, hi, per_decade=_PROBES_PER_DECADE):
    n = max(int(round((math.log10(hi) - math.log10(lo)) * per_decade)) + 1, 2)
    return np.logspace(math.log10(lo), math.log10(hi), n)


def delta2_index(y: YoungFunction, t_from: float = 0.0, horizon: float = HORIZON) -> float:
    """Sup of ``t y'(t) / y(t)`` over a log grid; ``inf`` flags a failed Delta_2.

    The infinite flag is raised when the sup exceeds 1e6, when ``y`` has a
    finite domain inside the window, or when the ratio is still increasing
    across the last two decades and has at least doubled there.  Floating
    overflow shortens the window to its last finite probe, which must leave
    at least two decades.
    """
    if t_from < 0:
        raise YoungFunctionError("t_from must be nonnegative")
    if y.domain_end < horizon:
        return math.inf
    grid = _probe_grid(max(t_from, 1e-6), horizon)
    with np.errstate(over="ignore", invalid="ignore"):
        v = y(grid)
        d = y.derivative(grid)
    finite = np.isfinite(v) & np.isfinite(d)
    if not finite.all():
        stop = int(np.argmin(finite))
        grid, v, d = grid[:stop], v[:stop], d[:stop]
        if stop < 2 or grid[-1] < 100 * grid[0]:
            return math.inf
    top = grid[-1]
    pos = v > 0
    with np.errstate(over="ignore", invalid="ignore"):
        ratio = d[pos] * (grid[pos] / v[pos])
    if ratio.size == 0 or not np.all(np.isfinite(ratio)):
        return math.inf
    sup = float(ratio.max())
    if sup > 1e6:
        return math.inf
    tail = ratio[grid[pos] >= top / 100]
    if tail.size > 2 and np.all(np.diff(tail) >= 0) and tail[-1] >= 2 * tail[0]:
        return math.inf
    return sup


def tail_index(y: YoungFunction, c: float = 1.0, horizon: float = HORIZON) -> float:
    """Log-log slope of ``t -> y(c t)`` over the last decade below ``horizon``."""
    t = _probe_grid(horizon / 10, horizon, 20)
    with np.errstate(divide="ignore"):
        lv = np.log(y(c * t))
    if not np.all(np.isfinite(lv)):
        return math.inf
    return float(np.polyfit(np.log(t), lv, 1)[0])


@dataclass(frozen=True, eq=False)
class DominationCertificate:
    """Witness that ``B(t) <= A(c t)`` for all probes ``t`` in ``[t0, horizon]``."""

    c: float
    t0: float
    mode: str
    witness_grid: np.ndarray = field(repr=False)
    horizon: float = HORIZON

    def to_dict(self):
        return {"c": self.c, "t0": self.t0, "mode": self.mode, "horizon": self.horizon,
                "probes": int(len(self.witness_grid))}


@dataclass(frozen=True)
class DominationSearch:
    """Outcome of a domination search, with the failing probe when empty."""

    certificate: Optional[DominationCertificate]
    #: probe where the best scale constant still failed
    witness_t: Optional[float] = None
    witness_ratio: Optional[float] = None
    tail_gap: float = 0.0


# Index slack allowed at the horizon before the ratio B(t)/A(ct) is deemed
# to be still increasing.
TREND_TOL = 1e-3


def domination_search(a, b, mode="near_infinity", horizon=HORIZON, max_k=40):
    """:func:`check_dominates` plus diagnostics (failing probe, index gap)."""
    if mode not in ("global", "near_infinity"):
        raise YoungFunctionError(f"unknown mode {mode!r}")
    lo = 1e-8 if mode == "global" else 1e-6
    probes = _probe_grid(lo, horizon)
    # near infinity: t0 on decades, always leaving >= 2 decades of probes
    t0_cands = [0.0] if mode == "global" else list(10.0 ** np.arange(-6, 7))
    bv = b(probes)
    # scale-free trend test: growth indices of b and a at the horizon
    gap = tail_index(b, 1.0, horizon) - tail_index(a, 1.0, horizon)
    witness = (None, None, gap)
    for k in range(max_k + 1):
        c = 2.0 ** k
        av = a(c * probes)
        ok = bv <= av * (1 + 1e-12)
        if gap <= TREND_TOL:
            for t0 in t0_cands:
                if np.all(ok[probes >= t0]):
                    cert = DominationCertificate(c, float(t0), mode, probes[probes >= t0], horizon)
                    return DominationSearch(cert, tail_gap=gap)
        # keep the witness of the largest constant tried
        fail = np.flatnonzero(~ok)
        i = int(fail[-1]) if fail.size else len(probes) - 1
        ratio = float(bv[i] / av[i]) if av[i] > 0 else math.inf
        witness = (float(probes[i]), ratio, gap)
    return DominationSearch(None, *witness)


def check_dominates(a: YoungFunction, b: YoungFunction, mode: str = "near_infinity",
                    horizon: float = HORIZON) -> Optional[DominationCertificate]:
    """Search ``c = 2^k`` (k = 0..40) and ``t0`` with ``b(t) <= a(c t)`` on ``[t0, horizon]``.

    A certificate also requires that the log-log slope of ``b`` over the
    last decade below the horizon does not exceed that of ``a`` by more than
    ``TREND_TOL``; otherwise ``b`` still gains on every ``a(c .)`` and the
    finite window cannot vouch for domination near infinity.
    """
    return domination_search(a, b, mode, horizon).certificate


def phi_q(q: float, t):
    """``t`` below 1 and ``t^q`` above."""
    if not q >= 1:
        raise YoungFunctionError(f"q must be >= 1, got {q}", "q")
    arr = _as_array(t)
    out = np.where(arr < 1, arr, arr ** q)
    return _wrap(out, t)
