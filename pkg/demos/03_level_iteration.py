"""The level-set iteration: hole filling, cutoffs and geometric decay.

Run: python3 demos/03_level_iteration.py
"""
import numpy as np

from orliczbound.degiorgi import hole_filling, iterate, optimized_cutoff
from orliczbound.sampled import radial_grid
from orliczbound.seeds import sample_seed
from orliczbound.young import power

# %% hole filling turns Z(r) <= theta Z(s) + a (s - r)^-alpha + b into an explicit bound
res = hole_filling(lambda r: 1.0 / (1.2 - r), theta=0.5, a=1.0, b=1.0, alpha=1.0,
                   rho=0.25, sigma=0.9)
print(f"hole filling: hypothesis {res.hypothesis_ok}, conclusion {res.conclusion_ok}, "
      f"c = {res.c:.3f} at lambda = {res.lam:.3f}")

# %% a cutoff between radii 1/2 and 3/4 chosen on good shells only
u = sample_seed("bump", radial_grid(3, 1.0, 256))
cut = optimized_cutoff(u, power(1.5), power(4), 0.5, 0.75, 4, "subcritical")
print(f"cutoff: |U| = {cut.measure_U:.3f} >= 0.125, max|eta'| = {cut.grad_eta_max:.2f} <= 8, "
      f"energy {cut.lhs:.3e} <= {cut.bound:.3e}")

# %% below eps0 the worst-case recurrence stays under tau^l J0; above it the envelope can fail
for factor in [1.0, 10.0]:
    base = iterate(0.0, 3, 6, L=2, c2=2)
    tr = iterate(factor * base.eps0, 3, 6, L=2, c2=2, steps=12)
    print(f"\nJ0 = {factor:g} eps0: {tr.verdict}")
    print("  J_l / (tau^l J0):", np.round(tr.J_values / tr.envelope(), 4)[:8])
