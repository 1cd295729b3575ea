"""Sublinear-sample Euclidean mean estimation.

Draw ``O(log 1/delta)`` uniform batches of ``O(1/eps)`` points, average each
batch, and aggregate the batch means with ``fastgd`` (gradient descent on the
geometric-median objective with a median line search) or ``minsum_select``
(recursive truncated-distance-sum selection).
"""

from .core import (
    CostOracle,
    DomainError,
    PointSet,
    approx_ratio,
    coordinate_median,
    cost,
    decomposition_check,
    is_eps_approx,
    mean,
    median_1d,
    select_kth,
)
from .sampling import (
    CandidateMeans,
    EstimatorConfig,
    RngStream,
    draw_candidate_means,
    empirical_mean_estimate,
)
from .fastgd import GDTrace, fastgd, geo_median_gradient, line_median_step
from .minsum import WinnerScore, compute_winner, minsum_estimate, minsum_select
from .baselines import coordinate_median_of_means, geometric_median_of_means, weiszfeld
from .instances import (
    InstanceSpec,
    gen_empirical_mean_lb,
    gen_gaussian,
    gen_pareto_tail,
    gen_two_cluster,
    gen_two_point_lb,
)
from .formats import read_pointset, write_pointset
from .harness import estimate, run_experiment, run_scaling_bench

__version__ = "0.1.0"
