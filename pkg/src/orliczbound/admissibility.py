"""Decide whether growth envelopes ``(A, B, E)`` force local boundedness.

The decision combines three numeric certificates: the regime of ``A``
(decided by the convergence of ``int^oo (t/A)^(1/(n-2))``), domination of
``B`` by the ``(n-1)``-dimensional Sobolev conjugate of ``A`` in the
subcritical regime, and domination of ``E`` by the ``n``-dimensional one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .sobolev import (
    IntegralProfile,
    integral_profile,
    regularize_near_zero,
    sobolev_conjugate,
)
from .young import (
    HORIZON,
    TREND_TOL,
    DominationCertificate,
    YoungFunction,
    YoungFunctionError,
    delta2_index,
    domination_search,
    validate,
)

__all__ = [
    "SUBCRITICAL",
    "SUPERCRITICAL",
    "TRIVIAL",
    "GrowthSpec",
    "Verdict",
    "classify_regime",
    "analyze",
    "power_log_thresholds",
    "doubling_index",
    "EXIT_CODES",
]

SUBCRITICAL = "subcritical"
SUPERCRITICAL = "supercritical"
TRIVIAL = "trivially_bounded"

ADMISSIBLE = "admissible"
NOT_ADMISSIBLE = "not_admissible"
BOUNDARY = "boundary"

EXIT_CODES = {ADMISSIBLE: 0, NOT_ADMISSIBLE: 1, BOUNDARY: 2, TRIVIAL: 3}

# Tail-slope gaps below this are reported as inconclusive.
BOUNDARY_MARGIN = 0.05
DELTA2_CAP = 1e6


@dataclass(frozen=True)
class GrowthSpec:
    A: YoungFunction
    B: YoungFunction
    n: int
    E: Optional[YoungFunction] = None
    L: float = 1.0
    t0: float = 0.0
    Q: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise YoungFunctionError(f"n must be an integer >= 2, got {self.n}", "n")
        if not self.L >= 1:
            raise YoungFunctionError("L must be >= 1", "L")
        if not self.t0 >= 0:
            raise YoungFunctionError("t0 must be >= 0", "t0")
        if not self.Q >= 1:
            raise YoungFunctionError("Q must be >= 1", "Q")
        if self.E is not None:
            validate(self.E, "E", monotone_only=True)


@dataclass
class Verdict:
    outcome: str
    regime: str
    admissible: bool
    b_check: Optional[DominationCertificate] = None
    e_check: Optional[DominationCertificate] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def to_dict(self) -> dict:
        def cert(c):
            return None if c is None else c.to_dict()

        return {"outcome": self.outcome, "regime": self.regime, "admissible": self.admissible,
                "b_check": cert(self.b_check), "e_check": cert(self.e_check),
                "diagnostics": _jsonable(self.diagnostics)}

    def summary(self) -> str:
        lines = [f"outcome: {self.outcome}", f"regime: {self.regime}"]
        if self.b_check is not None:
            lines.append(f"B <= A_(n-1)(c t) for t >= {self.b_check.t0:g} with c = {self.b_check.c:g}")
        if self.e_check is not None:
            lines.append(f"E <= A_n(c t) for t >= {self.e_check.t0:g} with c = {self.e_check.c:g}")
        for key in ("b_witness", "e_witness"):
            w = self.diagnostics.get(key)
            if w:
                lines.append(f"{key}: {w}")
        return "\n".join(lines)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, IntegralProfile):
        return {"m": obj.exponent_m, "at_zero": obj.at_zero, "at_infinity": obj.at_infinity,
                "zero_fit": list(obj.zero_fit), "infinity_fit": list(obj.infinity_fit)}
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def classify_regime(A: YoungFunction, n: int) -> str:
    """``subcritical``, ``supercritical`` or ``trivially_bounded``.

    Returns ``trivially_bounded`` when ``int^oo (t/A)^(1/(n-1))`` converges,
    since then every function in the energy space is already bounded.
    """
    if n < 2:
        raise YoungFunctionError("n must be >= 2", "n")
    if integral_profile(A, 1.0 / (n - 1)).at_infinity != "diverges":
        return TRIVIAL
    if n == 2:
        return SUPERCRITICAL
    sub = integral_profile(A, 1.0 / (n - 2)).at_infinity == "diverges"
    return SUBCRITICAL if sub else SUPERCRITICAL


def doubling_index(E: YoungFunction, t_from: float = 0.0, horizon: float = HORIZON) -> float:
    """``sup E(2t)/E(t)`` over log probes in ``[max(t_from, 1), horizon]``; ``inf`` if unbounded."""
    t = np.logspace(math.log10(max(t_from, 1.0)), math.log10(horizon), 401)
    e1, e2 = E(t), E(2 * t)
    if not (np.all(np.isfinite(e2)) and np.all(e1 > 0)):
        return math.inf
    r = e2 / e1
    tail = r[t >= horizon / 100]
    if r.max() > DELTA2_CAP or (np.all(np.diff(tail) >= 0) and tail[-1] >= 2 * tail[0]):
        return math.inf
    return float(r.max())


def _check(target, f, label, diag, L, horizon):
    res = domination_search(target, f, "near_infinity", horizon)
    if res.certificate is not None:
        diag[f"{label}_c_within_L"] = res.certificate.c <= L
        return res.certificate, None
    gap = res.tail_gap
    w = {"t": res.witness_t, "ratio": res.witness_ratio, "slope_gap": gap}
    if res.witness_ratio and 0 < res.witness_ratio < 1 and gap > TREND_TOL:
        # where the fitted tails cross for the largest constant tried
        w["log10_crossover_estimate"] = (math.log10(res.witness_t)
                                         - math.log10(res.witness_ratio) / gap)
    diag[f"{label}_witness"] = w
    boundary = TREND_TOL < gap < BOUNDARY_MARGIN - 1e-6
    return None, BOUNDARY if boundary else NOT_ADMISSIBLE


def analyze(spec: GrowthSpec, horizon: float = HORIZON) -> Verdict:
    """Assemble the admissibility verdict for ``spec``; probes stop at ``horizon``."""
    A, B, E, n = spec.A, spec.B, spec.E, int(spec.n)
    diag: dict = {"profile_n": integral_profile(A, 1.0 / (n - 1))}
    regime = classify_regime(A, n)
    if n >= 3:
        diag["profile_n_minus_1"] = integral_profile(A, 1.0 / (n - 2))
    if regime == TRIVIAL:
        return Verdict(TRIVIAL, TRIVIAL, True, diagnostics=diag)

    t1 = max(1.0, spec.t0)
    A_hat = regularize_near_zero(A, n, t1)
    diag["splice_t1"] = t1
    failures = []

    d2 = delta2_index(B, spec.t0, horizon)
    diag["delta2_B"] = d2
    if not math.isfinite(d2):
        failures.append(NOT_ADMISSIBLE)

    b_cert = e_cert = None
    if regime == SUBCRITICAL:
        An1 = sobolev_conjugate(A_hat, n - 1).result
        b_cert, fail = _check(An1, B, "b", diag, spec.L, horizon)
        if fail:
            failures.append(fail)
    if E is not None:
        dE = doubling_index(E, spec.t0, horizon)
        diag["doubling_E"] = dE
        if not math.isfinite(dE):
            failures.append(NOT_ADMISSIBLE)
        An = sobolev_conjugate(A_hat, n).result
        e_cert, fail = _check(An, E, "e", diag, spec.L, horizon)
        if fail:
            failures.append(fail)

    if not failures:
        outcome = ADMISSIBLE
    elif NOT_ADMISSIBLE in failures:
        outcome = NOT_ADMISSIBLE
    else:
        outcome = BOUNDARY
    return Verdict(outcome, regime, outcome == ADMISSIBLE, b_cert, e_cert, diag)


@dataclass(frozen=True)
class Thresholds:
    b_regime: str
    b_exponent: Optional[float]
    b_log_exponent: Optional[float]
    e_exponent: Optional[float]
    e_log_exponent: Optional[float]
    regime: str

    def to_dict(self):
        return dict(self.__dict__)


def power_log_thresholds(n: int, p: float, alpha: float) -> Thresholds:
    """Largest admissible ``t^b (log t)^beta`` growths for ``A ~ t^p (log t)^alpha``.

    ``b_regime`` is ``"threshold"`` when ``B`` is restricted and ``"any_B"``
    otherwise; the ``E`` exponents are ``None`` when ``p = n``, where any
    doubling ``E`` is admissible.
    """
    if n < 2 or int(n) != n:
        raise YoungFunctionError("n must be an integer >= 2", "n")
    if p < 1 or p > n:
        raise YoungFunctionError(f"need 1 <= p <= n, got p={p}", "p")
    if p == 1 and alpha < 0:
        raise YoungFunctionError("p = 1 requires alpha >= 0", "alpha")
    if p == n and alpha > n - 1:
        raise YoungFunctionError("p = n requires alpha <= n - 1", "alpha")
    if n >= 3 and p < n - 1:
        b, bl = (n - 1) * p / ((n - 1) - p), (n - 1) * alpha / ((n - 1) - p)
        b_regime, regime = "threshold", SUBCRITICAL
    else:
        b = bl = None
        b_regime, regime = "any_B", SUPERCRITICAL
    if n >= 3 and p == n - 1 and alpha <= n - 2:
        # the (n-2) integral still diverges; B is unrestricted all the same
        regime = SUBCRITICAL
    if p < n:
        e, el = n * p / (n - p), n * alpha / (n - p)
    else:
        e = el = None
    return Thresholds(b_regime, b, bl, e, el, regime)
