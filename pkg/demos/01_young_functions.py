"""Young functions, their conjugates and Sobolev conjugates.

Run: python3 demos/01_young_functions.py
"""
import numpy as np

from orliczbound.sobolev import regularize_near_zero, sobolev_conjugate
from orliczbound.young import conjugate, delta2_index, inverse, parse_spec

# %% conjugates of a few growth profiles
t = np.array([0.5, 1.0, 2.0, 4.0])
for text in ["power:2", "power:3", "powerlog:2:1"]:
    A = parse_spec(text)
    print(f"{text:>14}  A(t) = {np.round(A(t), 4)}  conj(t) = {np.round(conjugate(A)(t), 4)}")

# %% the sandwich s <= A^-1(s) conj^-1(s) <= 2s
A = parse_spec("powerlog:2:1")
s = np.logspace(-3, 3, 7)
ratio = inverse(A, s) * inverse(conjugate(A), s) / s
print("\nA^-1(s) conj^-1(s) / s:", np.round(ratio, 4))

# %% growth indices: polynomial profiles are doubling, exponential ones are not
for text in ["power:2.5", "powerlog:2:1", "exp:1"]:
    print(f"delta2 index of {text}: {delta2_index(parse_spec(text), 1.0):.3f}")

# %% the Sobolev conjugate of t^p grows like t^(np/(n-p))
n, p = 3, 1.5
An = sobolev_conjugate(parse_spec(f"power:{p}"), n)
big = np.logspace(1, 4, 50)
slope = np.polyfit(np.log(big), np.log(An(big)), 1)[0]
print(f"\nA_{n} for t^{p}: log-log slope {slope:.6f} (expected {n * p / (n - p)})")

# t^3 is too fast near zero in three dimensions; splicing a chord below t = 1 fixes that
Ah = regularize_near_zero(parse_spec("power:3"), 3)
print("regularized t^3 near zero:", Ah(np.array([0.25, 0.5, 2.0])))
