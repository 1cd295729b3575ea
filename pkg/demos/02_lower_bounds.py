"""The two hard instances behind the sample-size bounds.

On the two-point set every estimator succeeds once it spends the full batch
budget. On the spike set a plain mean of 40 draws misses the target whenever
its sample holds unequal numbers of left and right spikes, which happens
about a third of the time; batching and aggregating removes the problem.
"""

# %%
from meanest import EstimatorConfig, RngStream, estimate, gen_empirical_mean_lb, gen_two_point_lb

A, oracle = gen_two_point_lb(1000, 0.5)
print(f"two-point: mean {oracle.mean[0]:.4f}, OPT {oracle.opt:.2f}")
cfg = EstimatorConfig.practical(0.5, 0.1)
for method in ("fastgd", "minsum", "gmom", "coordmed", "empirical"):
    wins = sum(estimate(A, cfg, method, RngStream(0, (t,)), oracle).success for t in range(300))
    print(f"  {method:>9}: {wins}/300 within 1+eps")

# %%
B, spikes = gen_empirical_mean_lb(160_000, 40, 0.05)
cfg = EstimatorConfig.practical(0.05, 0.1)
trials = 2000
fails = sum(
    not estimate(B, cfg, "empirical", RngStream(1, (t,)), spikes, sample_size=40).success for t in range(trials)
)
print(f"spikes: empirical mean of 40 draws fails {fails / trials:.3f} of the time")

fails = sum(not estimate(B, cfg, "fastgd", RngStream(2, (t,)), spikes).success for t in range(200))
print(f"spikes: fastgd with {cfg.sample_count} samples fails {fails}/200 times")
