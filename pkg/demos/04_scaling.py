"""How aggregation time grows with the number of candidate means.

Scoring every candidate against all others is quadratic; splitting into
square-root sized clusters first brings it to about m^1.5; the descent with
median line search is near linear.
"""

# %%
from meanest import run_scaling_bench

res = run_scaling_bench(sizes=(256, 1024, 4096), d=16, reps=5)
for row in res.rows:
    print(f"{row['method']:>15} m={row['m']:>5}: {row['median_ns'] / 1e6:9.3f} ms")
for method, slope in res.slopes.items():
    print(f"{method:>15}: log-log slope {slope:.2f}")
