"""Confidence limits on the mean count from one observed count.

With s = 0.2 the pivot method gives closed-form limits.  For Poisson
counts (s = 0) the closed form is compared with the classical chi-square
(Garwood) interval.
"""
from nbcount import chi_square_ci, poisson_mean_from_count, two_sided

print("two-sided 95% limits at s = 0.2 (constants rounded to one decimal)")
print(f"{'count':>5} {'lower':>8} {'upper':>8}  rounded")
for n in (1, 3, 5, 7, 10, 20, 50, 100, 200):
    ci = two_sided(n, 0.2, 0.95, limit_decimals=1)
    lo, hi = ci.rounded()
    flag = "  (small count)" if "small_count" in ci.flags else ""
    print(f"{n:>5} {ci.lower:>8.2f} {ci.upper:>8.2f}  {lo}-{hi}{flag}")

n = 10
print(f"\nPoisson count n = {n}, 95% two-sided")
print(f"  closed form : {poisson_mean_from_count(n, 1.96):.3f} - {poisson_mean_from_count(n, -1.96):.3f}")
g = chi_square_ci(n, 0.95)
print(f"  chi-square  : {g.lower:.3f} - {g.upper:.3f}")

# Overdispersion widens the interval well beyond the Poisson one.
for s in (0.0, 0.1, 0.2, 0.3):
    ci = two_sided(n, s, 0.95)
    print(f"  s = {s}: {ci.lower:6.2f} - {ci.upper:6.2f} ({ci.method.value})")
