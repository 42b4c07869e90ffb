"""Geo-topological (GT) transforms of distance matrices and the threshold grid.

Curve shapes, with ``L < U`` absolute cutoffs and ``d_max`` the largest
distance of the matrix being transformed:

``t1``  ramp: 0 below ``L``, ``d_max * (d - L) / (U - L)`` on ``[L, U]``,
        ``d_max`` above ``U``.
``t0``  the same ramp with the lower level pinned to 0 (only ``u`` is
        searched).
``t2``  clamp: ``L`` below ``L``, identity on ``[L, U]``, ``U`` above ``U``.
``t3``  three-level step: 0 below ``L``, ``d_max / 2`` on ``[L, U]``,
        ``d_max`` above ``U``.

The diagonal always stays 0. Adding a kind means adding one entry to
``CURVES``.
"""

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDistances, GridTooSmall, InvalidThresholds
from .geometry import DistanceMatrix, offdiag_quantile


class TransformKind(str, enum.Enum):
    T0 = "t0"
    T1 = "t1"
    T2 = "t2"
    T3 = "t3"


class Mode(str, enum.Enum):
    SCALE = "scale"
    PERCENTILE = "percentile"


def _ramp(d, L, U, d_max, out=None):
    if L == 0.0 and U == d_max:
        # Exact identity, not merely identity up to rounding.
        if out is None:
            return np.array(d, dtype=np.float64, copy=True)
        out[...] = d
        return out
    # Clipping the ratio gives exactly 0 below L and d_max above U.
    if L == 0.0:
        # d - 0 is exact and distances are nonnegative, so only the top clips.
        out = np.divide(d, U, out=out, dtype=np.float64)
        np.minimum(out, 1.0, out=out)
    else:
        out = np.subtract(d, L, out=out, dtype=np.float64)
        out /= U - L
        np.clip(out, 0.0, 1.0, out=out)
    out *= d_max
    return out


def _clamp(d, L, U, d_max, out=None):
    return np.clip(d, L, U, out=out)


def _step(d, L, U, d_max, out=None):
    levels = np.where(d < L, 0.0, np.where(d > U, d_max, 0.5 * d_max))
    if out is None:
        return levels
    out[...] = levels
    return out


CURVES = {
    TransformKind.T0: _ramp,
    TransformKind.T1: _ramp,
    TransformKind.T2: _clamp,
    TransformKind.T3: _step,
}


@dataclass(frozen=True)
class GtParams:
    kind: TransformKind
    l: float
    u: float
    mode: Mode = Mode.SCALE

    def __post_init__(self):
        object.__setattr__(self, "kind", TransformKind(self.kind))
        object.__setattr__(self, "mode", Mode(self.mode))
        if not (0.0 <= self.l < 1.0 and 0.0 < self.u <= 1.0 and self.l < self.u):
            raise InvalidThresholds(
                f"need 0 <= l < u <= 1, got l={self.l}, u={self.u}")


@dataclass(frozen=True)
class ThresholdGrid:
    k: int
    kind: TransformKind
    levels: tuple
    pairs: tuple

    def __len__(self):
        return len(self.pairs)


def build_grid(k, kind=TransformKind.T1):
    """Grid of normalized ``(l, u)`` pairs on ``k`` equally spaced levels.

    Levels are ``i / (k - 1)``; pairs satisfy ``l < u`` and are ordered
    lexicographically. For ``t0`` only pairs with ``l = 0`` are kept.
    """
    kind = TransformKind(kind)
    if k < 2:
        raise GridTooSmall(f"grid needs at least 2 levels, got {k}")
    levels = tuple(i / (k - 1) for i in range(k))
    pairs = [(l, u) for l, u in itertools.combinations(levels, 2)]
    if kind is TransformKind.T0:
        pairs = [(l, u) for l, u in pairs if l == 0.0]
    return ThresholdGrid(k, kind, levels, tuple(pairs))


def resolve_thresholds(params, d):
    """Map normalized ``(l, u)`` to absolute cutoffs ``(L, U)`` for ``d``.

    Scale mode uses fractions of ``d_max``; percentile mode uses
    nearest-rank quantiles of the off-diagonal distances. If quantile ties
    give ``L == U``, ``U`` is widened by ``1e-12 * d_max``.
    """
    if d.d_max <= 0.0:
        raise DegenerateDistances("all observations are identical (d_max = 0)")
    if params.mode is Mode.SCALE:
        return params.l * d.d_max, params.u * d.d_max
    L = offdiag_quantile(d, params.l)
    U = offdiag_quantile(d, params.u)
    if U <= L:
        U = L + 1e-12 * d.d_max
    return L, U


def gt_values(d, L, U, d_max, kind, out=None):
    """Apply a GT curve elementwise to raw distance values."""
    return CURVES[TransformKind(kind)](np.asarray(d, dtype=np.float64), L, U, d_max,
                                       out=out)


def transform_entries(entries, d_max, L, U, kind, out=None):
    out = gt_values(entries, L, U, d_max, kind, out=out)
    np.fill_diagonal(out, 0.0)
    return out


def apply_gt(d, L, U, kind):
    """Transform every entry of ``d``; the diagonal stays 0."""
    if not 0.0 <= L < U:
        raise InvalidThresholds(f"need 0 <= L < U, got L={L}, U={U}")
    return DistanceMatrix.from_array(transform_entries(d.entries, d.d_max, L, U, kind))
