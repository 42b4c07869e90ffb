"""Transformed distance covariance/correlation and the adaptive statistics.

The sample estimator is the V-statistic plug-in: population expectations
become means over the full ``m x m`` matrix, zero diagonal included. It
equals the mean of the elementwise product of the two double-centered
matrices.

Sample-level statistics first put the observations in a canonical order
(lexicographic on the joint rows) so that relabeling the observations
jointly cannot change a single bit of the result.
"""

import enum
from dataclasses import dataclass, field

import numpy as np

from . import seeding
from .errors import DimensionMismatch, GridTooSmall
from .geometry import DistanceMatrix, _distances, as_sample
from .transform import (GtParams, Mode, ThresholdGrid, TransformKind,
                        build_grid, gt_values, resolve_thresholds,
                        transform_entries)

VARIANCE_FLOOR = 1e-12
NULL_RATIO_FLOOR = 1e-6
SPREAD_FLOOR = 1e-12


class StatKind(str, enum.Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"


@dataclass(frozen=True)
class AgticConfig:
    transform: TransformKind = TransformKind.T1
    mode: Mode = Mode.SCALE
    k: int = 5
    stat: StatKind = StatKind.S1
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "transform", TransformKind(self.transform))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "stat", StatKind(self.stat))
        if self.k < 2:
            raise GridTooSmall(f"grid needs at least 2 levels, got {self.k}")

    @property
    def name(self):
        base = self.transform.value + self.stat.value
        return "pagtic-" + base if self.mode is Mode.PERCENTILE else base

    def to_dict(self):
        return {"transform": self.transform.value, "mode": self.mode.value,
                "k": self.k, "stat": self.stat.value, "seed": self.seed}


@dataclass(frozen=True)
class GridEvaluation:
    """Transformed dCor at every grid pair (an "AGTIC map")."""

    grid: ThresholdGrid
    values: tuple
    argmax_pair: tuple = field(init=False)
    argmax_value: float = field(init=False)

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) != len(self.grid.pairs):
            raise ValueError("one value per grid pair is required")
        object.__setattr__(self, "values", values)
        # First occurrence is the lexicographically smallest pair.
        i = int(np.argmax(values))
        object.__setattr__(self, "argmax_pair", self.grid.pairs[i])
        object.__setattr__(self, "argmax_value", values[i])

    def rows(self):
        return [(l, u, v) for (l, u), v in zip(self.grid.pairs, self.values)]

    def to_dict(self):
        return {"k": self.grid.k, "transform": self.grid.kind.value,
                "pairs": [list(p) for p in self.grid.pairs],
                "values": list(self.values),
                "argmax_pair": list(self.argmax_pair),
                "argmax_value": self.argmax_value}

    @classmethod
    def from_dict(cls, d):
        grid = build_grid(d["k"], d["transform"])
        if [list(p) for p in grid.pairs] != [list(p) for p in d["pairs"]]:
            raise ValueError("stored pairs do not match the rebuilt grid")
        return cls(grid, tuple(d["values"]))


# Matrix-level estimators -------------------------------------------------

def _margins(a):
    """Row means ``(G, m)`` and grand means ``(G,)`` of a matrix stack."""
    m = a.shape[-1]
    rows = np.einsum("gij->gi", a) / m
    return rows, np.einsum("gi->g", rows) / m


def _dcov_terms(a, b, ma, mb):
    m = a.shape[-1]
    s1 = np.einsum("gij,gij->g", a, b) / (m * m)
    s2 = ma[1] * mb[1]
    s3 = np.einsum("gi,gi->g", ma[0], mb[0]) / m
    return s2 + s1 - 2.0 * s3


def _dcov_stack(a, b):
    """V-statistic dCov for stacks of matrices with shape ``(G, m, m)``."""
    return _dcov_terms(a, b, _margins(a), _margins(b))


def _dcor_stack(a, b):
    ma, mb = _margins(a), _margins(b)
    num = _dcov_terms(a, b, ma, mb)
    vx = _dcov_terms(a, a, ma, ma)
    vy = _dcov_terms(b, b, mb, mb)
    out = np.zeros_like(num)
    ok = (vx > VARIANCE_FLOOR) & (vy > VARIANCE_FLOOR)
    out[ok] = np.clip(num[ok] / np.sqrt(vx[ok] * vy[ok]), 0.0, 1.0)
    return out


def _check_same_size(dx, dy):
    if dx.m != dy.m:
        raise DimensionMismatch(f"matrix sizes differ: {dx.m} vs {dy.m}")


def dcov_gt(dx, dy):
    """V-statistic distance covariance of two (possibly transformed) matrices.

    Returns ``S2 + S1 - 2 * S3`` raw; it can be negative for transformed
    inputs.
    """
    _check_same_size(dx, dy)
    return float(_dcov_stack(dx.entries[None], dy.entries[None])[0])


def dcor_gt(dx, dy):
    """Distance correlation of two matrices, clamped to ``[0, 1]``.

    Returns 0 when either variance term is at or below ``1e-12``.
    """
    _check_same_size(dx, dy)
    return float(_dcor_stack(dx.entries[None], dy.entries[None])[0])


# Sample-level machinery --------------------------------------------------

def canonical_order(x, y):
    """Row order sorting the joint observations lexicographically."""
    joint = np.hstack([x, y])
    return np.lexsort(joint.T[::-1])


def _check_pair(x, y):
    x, y = as_sample(x), as_sample(y)
    if x.m != y.m:
        raise DimensionMismatch(f"sample sizes differ: {x.m} vs {y.m}")
    return x, y


def _transform_stack(d, pairs, kind, mode):
    """Transformed matrices for every grid pair, and a flatness flag for each.

    A matrix that is flat off the diagonal only says "every pair is
    equidistant". Its dCor with any other matrix does not depend on how
    the observations are paired, so it carries no evidence about
    dependence. The curves are monotone, so flatness only depends on the
    smallest and largest off-diagonal distances.
    """
    m = d.shape[0]
    dm = DistanceMatrix(d, float(d.max()))
    # View of the off-diagonal entries: drop the first element, then the
    # last column of the (m-1, m+1) reshape holds exactly the diagonal.
    off = d.reshape(-1)[1:].reshape(m - 1, m + 1)[:, :-1]
    ends = np.array([off.min(), off.max()])
    out = np.empty((len(pairs),) + d.shape)
    flat = np.empty(len(pairs), dtype=bool)
    for g, (l, u) in enumerate(pairs):
        L, U = resolve_thresholds(GtParams(kind, l, u, mode), dm)
        transform_entries(d, dm.d_max, L, U, kind, out=out[g])
        lo, hi = gt_values(ends, L, U, dm.d_max, kind)
        flat[g] = hi - lo <= 1e-12 * max(abs(hi), 1.0)
    return out, flat


class PreparedPair:
    """Transformed distance stacks for a fixed ``(x, y)``.

    :meth:`grid_values` evaluates the grid on ``(x[ix], y[iy])`` by
    reindexing the precomputed stacks. The result is bitwise equal to
    recomputing from the reindexed samples, because distances,
    thresholds, and transforms all commute exactly with row reordering.
    Grid points where either transformed matrix is flat off the diagonal
    score 0.
    """

    def __init__(self, x, y, grid=None, mode=Mode.SCALE):
        x, y = _check_pair(x, y)
        self.x, self.y = x, y
        self.grid = grid
        # Stacks are stored in canonical row order; ``_inv`` maps input rows there.
        order = canonical_order(x.data, y.data)
        self._inv = np.empty_like(order)
        self._inv[order] = np.arange(order.size)
        dx, dy = _distances(x.data[order]), _distances(y.data[order])
        if grid is None:
            self.tx, self.ty = dx[None], dy[None]
            self.flat = np.zeros(1, dtype=bool)
        else:
            self.tx, flat_x = _transform_stack(dx, grid.pairs, grid.kind, mode)
            self.ty, flat_y = _transform_stack(dy, grid.pairs, grid.kind, mode)
            self.flat = flat_x | flat_y
        self._cache = (None, None)

    @property
    def m(self):
        return self.x.m

    @staticmethod
    def _gather(stack, g):
        # Always C-ordered: the reductions sum in memory order, so a
        # transposed layout (what 2-D fancy indexing returns) changes the bits.
        m = g.size
        if np.array_equal(g, np.arange(m)):
            return stack
        flat = (g[:, None] * m + g[None, :]).ravel()
        return np.take(stack.reshape(stack.shape[0], -1), flat, axis=1).reshape(stack.shape)

    def _x_block(self, gx):
        last, block = self._cache
        if last is not None and np.array_equal(last, gx):
            return block
        block = self._gather(self.tx, gx)
        self._cache = (gx, block)
        return block

    def grid_values(self, ix=None, iy=None):
        ix = np.arange(self.m) if ix is None else np.asarray(ix)
        iy = np.arange(self.m) if iy is None else np.asarray(iy)
        o = canonical_order(self.x.data[ix], self.y.data[iy])
        gx, gy = self._inv[ix[o]], self._inv[iy[o]]
        values = _dcor_stack(self._x_block(gx), self._gather(self.ty, gy))
        values[self.flat] = 0.0
        return values


def evaluate_grid(x, y, cfg=AgticConfig()):
    grid = build_grid(cfg.k, cfg.transform)
    values = PreparedPair(x, y, grid, cfg.mode).grid_values()
    return GridEvaluation(grid, tuple(values))


def dcor_plain(x, y):
    """Plain (untransformed) distance correlation of two samples."""
    return float(PreparedPair(x, y).grid_values()[0])


def s3_ratio(values):
    """Maximum over population standard deviation; 0 for a flat map."""
    values = np.asarray(values, dtype=np.float64)
    if values.size < 2:
        raise GridTooSmall("the spread-normalized statistic needs >= 2 grid pairs")
    sd = float(np.std(values))
    if sd <= SPREAD_FLOOR:
        return 0.0
    return float(values.max() / sd)


def s2_ratios(values, null_values):
    return np.asarray(values) / np.maximum(np.asarray(null_values), NULL_RATIO_FLOOR)


def null_copy_indices(seed, m):
    """The row permutations used for the S2 null copies of ``x`` and ``y``."""
    rng = seeding.substream(seed, seeding.NULL_COPY_KEY)
    return rng.permutation(m), rng.permutation(m)


def _reduce(cfg, grid, values, null_values=None):
    if cfg.stat is StatKind.S1:
        scores = values
        value = float(values.max())
    elif cfg.stat is StatKind.S2:
        scores = s2_ratios(values, null_values)
        value = float(scores.max())
    else:
        scores = values
        value = s3_ratio(values)
    return value, grid.pairs[int(np.argmax(scores))]


class AgticStatistic:
    """Callable AGTIC statistic for one configuration.

    ``stat(x, y)`` returns the statistic value; :meth:`evaluate` also
    returns the optimal ``(l, u)`` pair.
    """

    def __init__(self, cfg=AgticConfig()):
        self.cfg = cfg
        self.grid = build_grid(cfg.k, cfg.transform)
        if cfg.stat is StatKind.S3 and len(self.grid) < 2:
            raise GridTooSmall("the spread-normalized statistic needs >= 2 grid pairs")

    @property
    def name(self):
        return self.cfg.name

    def prepare(self, x, y):
        prepared = PreparedPair(x, y, self.grid, self.cfg.mode)
        copies = (null_copy_indices(self.cfg.seed, prepared.m)
                  if self.cfg.stat is StatKind.S2 else None)

        def evaluate(iy=None, ix=None):
            ix = np.arange(prepared.m) if ix is None else np.asarray(ix)
            iy = np.arange(prepared.m) if iy is None else np.asarray(iy)
            values = prepared.grid_values(ix, iy)
            null = None
            if copies is not None:
                # Copies index the canonical order, so relabeling cannot move them.
                o = canonical_order(prepared.x.data[ix], prepared.y.data[iy])
                null = prepared.grid_values(ix[o][copies[0]], iy[o][copies[1]])
            return _reduce(self.cfg, self.grid, values, null)

        return evaluate

    def evaluate(self, x, y):
        return self.prepare(x, y)()

    def __call__(self, x, y):
        return self.evaluate(x, y)[0]


def agtic(x, y, cfg=AgticConfig()):
    """AGTIC value and the optimal normalized threshold pair."""
    return AgticStatistic(cfg).evaluate(x, y)


def agtic_with_null_copies(x, y, cfg, copy_x, copy_y):
    """S2 statistic with explicitly supplied null-copy permutations.

    The copies index the rows as given. The seeded statistic applies its
    copies to the canonical row order instead.
    """
    if cfg.stat is not StatKind.S2:
        raise ValueError("null copies only apply to the s2 statistic")
    prepared = PreparedPair(x, y, build_grid(cfg.k, cfg.transform), cfg.mode)
    values = prepared.grid_values()
    null = prepared.grid_values(np.asarray(copy_x), np.asarray(copy_y))
    return _reduce(cfg, prepared.grid, values, null)


class DcorStatistic:
    """Plain distance correlation with the same permutation fast path."""

    name = "dcor"

    def prepare(self, x, y):
        prepared = PreparedPair(x, y)

        def evaluate(iy=None, ix=None):
            return float(prepared.grid_values(ix, iy)[0]), None

        return evaluate

    def evaluate(self, x, y):
        return self.prepare(x, y)()

    def __call__(self, x, y):
        return self.evaluate(x, y)[0]
