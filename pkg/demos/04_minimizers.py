"""Discrete minimizers of mixed-growth energies.

Run: python3 demos/04_minimizers.py
"""
import numpy as np

from orliczbound.harness import (
    FunctionalSpec, boundedness_sweep, discretize, interior_sup, minimize, quasi_min_check,
)
from orliczbound.young import power

# %% with A = B = t^2 and boundary data x1 the minimizer is the linear function
P = discretize(FunctionalSpec(power(2), power(2), boundary="x1"), 2, 16)
res = minimize(P, tol=1e-14)
print(f"Dirichlet: {res.iterations} iterations, "
      f"max error {np.max(np.abs(res.values - P.vertices[:, 0])):.1e}")
print("quasi-min check:", quasi_min_check(P, res.values, trials=100)["violations"], "violations")

# %% t^p growth on the left half, t^q on the right; the interior sup under refinement
rows = boundedness_sweep(2, [2], [2, 4], refinements=(0, 1, 2))
for r in rows:
    print(f"p={r['p']:g} q={r['q']:g} cells={8 * 2 ** r['refinement']:3d} "
          f"sup={r['interior_sup']:.5f} energy={r['energy']:.5f} {r['verdict']}")

# %% a non-affine boundary and t^4 growth
P = discretize(FunctionalSpec(power(4), power(4), boundary="x1 + 0.3 * x2 ** 2"), 2, 16)
res = minimize(P)
print(f"\nt^4 energy {res.energy:.6f}, interior sup {interior_sup(P, res.values):.4f}")
