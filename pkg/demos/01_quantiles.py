"""How close is the skew-corrected normal approximation to exact count quantiles?

Counts whose variance is N + s^2 N^2 follow a negative binomial law.  Here
the exact 5% and 95% quantiles are compared with the closed-form
approximation over a range of means, for a Poisson case and for s = 0.2.
"""
from nbcount import CountModel, nb_quantile_exact, pivot_limit, quantile_discrete, quantile_smooth
from nbcount.nbapprox import normalized_quantile

for s in (0.0, 0.2):
    print(f"\ns = {s}")
    print(f"{'N':>6} {'b':>5} {'exact':>6} {'approx':>6} {'smooth':>8}")
    for N in (3, 10, 30, 100):
        m = CountModel(N, s)
        for b in (0.05, 0.95):
            print(f"{N:>6} {b:>5} {nb_quantile_exact(b, m):>6} {quantile_discrete(b, m):>6} "
                  f"{quantile_smooth(b, m):>8.2f}")

# For large means, (n_b - N)/sigma settles on a constant that depends on s.
print("\nnormalized 95% quantile at s = 0.2")
for N in (10, 100, 1000, 10000):
    print(f"  N = {N:>6}: {normalized_quantile(0.95, CountModel(N, 0.2)):.3f}")
print(f"  limit      : {pivot_limit(0.95, 0.2):.3f}")
