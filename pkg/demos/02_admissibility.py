"""Which pairs of growths (A, B) give bounded minimizers?

Run: python3 demos/02_admissibility.py
"""
from orliczbound.admissibility import GrowthSpec, analyze, power_log_thresholds
from orliczbound.young import power, power_log

# %% power laws in three dimensions: the cut-off for B = t^q sits at q = 2p / (2 - p)
n, p = 3, 1.5
for q in [5.0, 5.9, 6.0, 6.02, 6.1, 7.0]:
    v = analyze(GrowthSpec(power(p), power(q), n))
    print(f"p = {p}, q = {q:5.2f}: {v.outcome:>15}  ({v.regime})")

# %% p above n - 1 puts every doubling B in reach
print("\np = 2.5:", analyze(GrowthSpec(power(2.5), power(40), 3)).outcome)
print("p = 4:  ", analyze(GrowthSpec(power(4), power(9), 3)).outcome)

# %% logarithmic corrections shift the threshold in both exponents
th = power_log_thresholds(3, 1.5, 1)
print(f"\nA = t^1.5 log t: B may grow like t^{th.b_exponent:g} (log t)^{th.b_log_exponent:g}")
v = analyze(GrowthSpec(power_log(1.5, 1), power_log(5.5, 4), 3))
print("B = t^5.5 (log t)^4:", v.outcome)
