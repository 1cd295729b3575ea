"""A reproducible Monte Carlo comparison written to CSV and JSON.

Rerunning with the same seed gives identical statistics, whatever the
worker count.
"""

# %%
import tempfile
from pathlib import Path

from meanest import run_experiment

spec = {
    "instance": {"kind": "pareto_tail", "params": {"n": 20_000, "d": 4, "alpha": 2.2}, "seed": 3},
    "estimators": ["fastgd", {"method": "minsum", "depth": 0}, {"method": "minsum", "depth": 1}, "gmom",
                   "empirical"],
    "eps": 0.1,
    "delta": 0.05,
    "trials": 200,
    "seed": 11,
}
out = Path(tempfile.mkdtemp())
report = run_experiment(spec, out)

# %%
for label, s in report.estimators.items():
    r = s["approx_ratio"]
    print(f"{label:>10}: success {s['success_rate']:.3f}  median ratio {r['median']:.4f}  p99 {r['p99']:.4f}")
print("wrote", sorted(p.name for p in out.iterdir()))
