"""Estimate the mean of a point set from a small sample.

Draws a few dozen batch means, aggregates them three ways, and scores each
answer against the exact mean.
"""

# %%
import numpy as np

from meanest import EstimatorConfig, RngStream, draw_candidate_means, fastgd, gen_gaussian
from meanest import approx_ratio, is_eps_approx, minsum_select, weiszfeld

A, oracle = gen_gaussian(50_000, 8, sigma=3.0, seed=1)
cfg = EstimatorConfig.practical(eps=0.2, delta=0.05, seed=7)
print(f"n={A.n} d={A.d}: {cfg.num_batches} batches of {cfg.batch_size} ({cfg.sample_count} samples)")

# %%
# every aggregator sees the same candidate means
cand = draw_candidate_means(A, cfg, RngStream(cfg.seed))
answers = {
    "fastgd": fastgd(cand, cfg)[0],
    "minsum depth 1": minsum_select(cand, 1),
    "weiszfeld": weiszfeld(cand.means),
    "one batch": cand.means[0],
}
for name, c in answers.items():
    ok = is_eps_approx(oracle, c, cfg.eps)
    print(f"{name:>15}: cost ratio {approx_ratio(oracle, c):.5f}  within 1+eps: {ok}")

# %%
# the descent trace shows how fast the line search settles
_, trace = fastgd(cand, cfg)
print("gradient norms:", np.round(trace.gradient_norms, 2))
