"""Adaptive geo-topological independence criterion (AGTIC).

Distance correlation after monotone threshold transforms of the distance
matrices, maximized over a grid of thresholds, with permutation tests,
synthetic patterns, baselines and a power benchmark harness.
"""

from .baselines import hsic, pearson_r2, rdm_cor
from .geometry import (DistanceMatrix, Sample, max_distance, offdiag_quantile,
                       pairwise_euclidean, read_csv)
from .inference import (PermutationPlan, TestOutcome, null_distribution,
                        p_value, run_test, shuffle_pairing)
from .methods import make_statistic
from .statistic import (AgticConfig, AgticStatistic, GridEvaluation, StatKind,
                        agtic, dcor_gt, dcor_plain, dcov_gt, evaluate_grid)
from .synthesis import (NoiseLadder, PatternId, PatternSpec, generate,
                        generate_combinatorial, noise_ladder)
from .transform import (GtParams, Mode, ThresholdGrid, TransformKind, apply_gt,
                        build_grid, resolve_thresholds)

__version__ = "0.1.0"
