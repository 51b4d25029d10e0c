"""Modulars, Luxemburg norms and the Orlicz inequalities checked on samples."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .sampled import GridError, SampledFunction, radial_grid
from .seeds import BASKET, Seed, sample_seed
from .sobolev import integral_profile, regularize_near_zero, sobolev_conjugate
from .young import YoungFunction, conjugate, inverse

__all__ = [
    "UnboundedNormError",
    "modular",
    "luxemburg_norm",
    "indicator_norm",
    "holder_defect",
    "sobolev_poincare_defect",
    "SPCertificate",
    "search_sp_kappa",
]

NORM_RTOL = 1e-9


class UnboundedNormError(ArithmeticError):
    pass


def modular(Y: YoungFunction, u: SampledFunction, use_gradient: bool = False) -> float:
    """``sum_i w_i Y(|field_i|)`` where the field is ``u`` or ``|grad u|``."""
    if use_gradient:
        if u.gradient_values is None and not u.has_fd_fallback:
            raise GridError("no gradient stored and no finite-difference fallback")
        f = u.grad_norm
    else:
        f = np.abs(u.values)
    return float(np.sum(u.weights * Y(f)))


def _field_modular(Y, w, f, lam):
    with np.errstate(over="ignore"):
        return float(np.sum(w * Y(f / lam)))


def luxemburg_norm(Y: YoungFunction, u: SampledFunction, use_gradient: bool = False,
                   return_modular: bool = False):
    """``inf{lam > 0 : modular(Y, u / lam) <= 1}`` by bracketing and bisection.

    The result ``lam`` satisfies ``modular(Y, u / lam)`` in ``[1 - 1e-9, 1]``
    whenever the modular is continuous in ``lam`` there.
    """
    f = u.grad_norm if use_gradient else np.abs(u.values)
    w = u.weights
    if not np.any(f > 0):
        return (0.0, 0.0) if return_modular else 0.0
    exps = np.arange(-12, 13)
    hi = None
    for k in exps:
        if _field_modular(Y, w, f, 10.0 ** k) <= 1.0:
            hi = 10.0 ** k
            break
    if hi is None:
        raise UnboundedNormError("modular exceeds 1 for every lambda up to 1e12")
    if hi == 10.0 ** exps[0]:
        raise UnboundedNormError("modular is below 1 already at lambda = 1e-12")
    lo = hi / 10
    m_hi = _field_modular(Y, w, f, hi)
    for _ in range(200):
        if m_hi >= 1 - NORM_RTOL or hi - lo <= 4e-16 * hi:
            break
        mid = 0.5 * (lo + hi)
        m = _field_modular(Y, w, f, mid)
        if m <= 1.0:
            hi, m_hi = mid, m
        else:
            lo = mid
    return (hi, m_hi) if return_modular else hi


def indicator_norm(Y: YoungFunction, measure: float) -> float:
    """Closed form ``1 / Y^{-1}(1/|E|)`` of the norm of an indicator."""
    return 1.0 / inverse(Y, 1.0 / measure)


def holder_defect(u: SampledFunction, v: SampledFunction, Y: YoungFunction,
                  Y_conj: Optional[YoungFunction] = None) -> float:
    """``2 ||u||_Y ||v||_{Y~} - int |u v|``; nonnegative by Hoelder's inequality."""
    if not u.grid.same_as(v.grid):
        raise GridError("u and v live on different grids")
    Yc = conjugate(Y) if Y_conj is None else Y_conj
    bound = 2.0 * luxemburg_norm(Y, u) * luxemburg_norm(Yc, v)
    return bound - float(np.sum(u.weights * np.abs(u.values * v.values)))


def _needs_regularizing(A, n):
    return integral_profile(A, 1.0 / (n - 1)).at_zero != "converges"


def sobolev_poincare_defect(u: SampledFunction, A: YoungFunction, n: int, kappa: float,
                            regularize: bool = True) -> float:
    """RHS minus LHS of the modular Sobolev-Poincare inequality on the ball of ``u``.

    ``A`` is replaced by its near-zero chord splice when its Sobolev
    conjugate would not exist; both sides then use the spliced function.
    """
    if u.n != n:
        raise GridError(f"field is {u.n}-dimensional, expected {n}")
    Ah = regularize_near_zero(A, n) if (regularize and _needs_regularizing(A, n)) else A
    An = sobolev_conjugate(Ah, n).result
    rhs = modular(Ah, u, use_gradient=True)
    dev = np.abs(u.values - u.mean())
    if rhs == 0:
        if np.all(dev <= 1e-14 * (1 + np.abs(u.values).max())):
            return 0.0
        raise ZeroDivisionError("gradient modular vanishes for a non-constant field")
    scale = kappa * rhs ** (1.0 / n)
    with np.errstate(over="ignore"):
        lhs = float(np.sum(u.weights * An(dev / scale)))
    return rhs - lhs


@dataclass
class SPCertificate:
    n: int
    kappa: float
    seeds: list
    young: list
    amplitudes: list
    worst_defect: float
    grid: dict
    defects: list = field(default_factory=list)

    def to_dict(self):
        return {"n": self.n, "kappa": self.kappa, "seeds": self.seeds, "young": self.young,
                "amplitudes": self.amplitudes, "worst_relative_defect": self.worst_defect,
                "grid": self.grid, "defects": self.defects}


SP_RTOL = 1e-6


def search_sp_kappa(n: int, youngs: Sequence[YoungFunction],
                    seeds: Iterable[Seed] = BASKET, amplitudes=(1.0,),
                    shells: int = 96, max_k: int = 20, out=None) -> SPCertificate:
    """Smallest ``kappa = 2^k / 8`` keeping every defect >= -1e-6 * RHS over the basket."""
    seeds = list(seeds)
    grid = radial_grid(n, 1.0, shells)
    fields = [(s.name, a, sample_seed(s, grid, a)) for s in seeds for a in amplitudes]
    young_docs = [y.to_dict() for y in youngs]
    for k in range(max_k + 1):
        kappa = 2.0 ** k / 8
        worst, rows, ok = math.inf, [], True
        for A, doc in zip(youngs, young_docs):
            for name, a, u in fields:
                Ah = regularize_near_zero(A, n) if _needs_regularizing(A, n) else A
                scale = max(modular(Ah, u, use_gradient=True), 1e-300)
                d = sobolev_poincare_defect(u, A, n, kappa)
                rows.append({"seed": name, "amplitude": a, "young": doc, "defect": d,
                             "scale": scale})
                worst = min(worst, d / scale)
                if d < -SP_RTOL * scale:
                    ok = False
        if ok:
            cert = SPCertificate(n, kappa, [s.name for s in seeds], young_docs,
                                 list(amplitudes), worst, grid.to_header(), rows)
            if out is not None:
                Path(out).parent.mkdir(parents=True, exist_ok=True)
                Path(out).write_text(json.dumps(cert.to_dict(), indent=2) + "\n")
            return cert
    raise ArithmeticError(f"no kappa <= 2^{max_k}/8 satisfies the basket")
