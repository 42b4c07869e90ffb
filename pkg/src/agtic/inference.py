"""Permutation tests: null distributions, p-values, reject decisions."""

from dataclasses import dataclass

import numpy as np

from . import seeding
from .errors import AgticError, DimensionMismatch, EmptyNulls
from .geometry import as_sample

MIN_PERMUTATIONS = 19


@dataclass(frozen=True)
class PermutationPlan:
    """``n_perms >= 19`` so the add-one p-value can reach 0.05."""

    n_perms: int = 99
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.n_perms < MIN_PERMUTATIONS:
            raise AgticError(
                f"n_perms must be >= {MIN_PERMUTATIONS}, got {self.n_perms}")
        if not 0.0 < self.alpha < 1.0:
            raise AgticError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.seed < 2 ** 64:
            raise AgticError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class TestOutcome:
    __test__ = False  # not a pytest class

    statistic: float
    optimal_thresholds: tuple
    null_values: tuple
    p_value: float
    reject: bool

    def to_dict(self, plan=None, config=None):
        l, u = self.optimal_thresholds or (None, None)
        out = {"statistic": self.statistic, "l": l, "u": u,
               "p_value": self.p_value, "reject": self.reject,
               "n_perms": len(self.null_values)}
        if plan is not None:
            out.update(seed=plan.seed, alpha=plan.alpha)
        if config is not None:
            out["config"] = config
        return out


def permutation_indices(seed, index, m):
    """Row permutation for null draw ``index`` of a plan seeded with ``seed``."""
    return seeding.substream(seed, seeding.PERMUTATION_KEY, index).permutation(m)


def shuffle_pairing(y, stream):
    """Rows of ``y`` rearranged by a uniform permutation drawn from ``stream``."""
    y = as_sample(y)
    return y.take(stream.permutation(y.m))


def _evaluator(stat, x, y):
    """Return ``f(perm) -> (value, optimal)`` evaluating ``stat(x, y[perm])``."""
    if hasattr(stat, "prepare"):
        return stat.prepare(x, y)
    evaluate = getattr(stat, "evaluate", None)

    def run(perm=None):
        yy = y if perm is None else y.take(perm)
        if evaluate is not None:
            return evaluate(x, yy)
        return float(stat(x, yy)), None

    return run


def null_distribution(stat, x, y, plan):
    """``plan.n_perms`` values of ``stat(x, shuffled y)`` in index order.

    Shuffle ``i`` comes from the substream ``(plan.seed, i)``.
    """
    x, y = as_sample(x), as_sample(y)
    if x.m != y.m:
        raise DimensionMismatch(f"sample sizes differ: {x.m} vs {y.m}")
    return _null_values(_evaluator(stat, x, y), plan, y.m)


def _null_values(run, plan, m):
    return np.array([run(permutation_indices(plan.seed, i, m))[0]
                     for i in range(plan.n_perms)], dtype=np.float64)


def p_value(stat_value, nulls):
    """Add-one permutation p-value; ties count against the statistic."""
    nulls = np.asarray(nulls, dtype=np.float64)
    if nulls.size == 0:
        raise EmptyNulls("null distribution is empty")
    return (1.0 + np.count_nonzero(nulls >= stat_value)) / (1.0 + nulls.size)


def run_test(x, y, stat, plan=PermutationPlan()):
    """Permutation test of independence between ``x`` and ``y``.

    ``stat`` is any statistic procedure (see :func:`agtic.methods.make_statistic`);
    the null values re-run the exact same procedure on each shuffle.
    """
    x, y = as_sample(x), as_sample(y)
    if x.m != y.m:
        raise DimensionMismatch(f"sample sizes differ: {x.m} vs {y.m}")
    run = _evaluator(stat, x, y)
    value, optimal = run(None)
    nulls = _null_values(run, plan, y.m)
    p = p_value(value, nulls)
    return TestOutcome(float(value), tuple(optimal) if optimal else None,
                       tuple(nulls.tolist()), p, bool(p <= plan.alpha))
