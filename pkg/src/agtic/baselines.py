"""Reference dependence statistics: squared Pearson, RDM correlation, HSIC.

Constant-input guards return 0 and emit :class:`DegenerateInputWarning`.
Each function orders the observations canonically first, so joint
relabeling leaves results bit-identical.
"""

import warnings

import numpy as np

from .errors import DimensionMismatch, DegenerateInputWarning
from .geometry import DistanceMatrix, _distances, as_sample, offdiag_quantile
from .statistic import canonical_order


def _pair(x, y):
    x, y = as_sample(x), as_sample(y)
    if x.m != y.m:
        raise DimensionMismatch(f"sample sizes differ: {x.m} vs {y.m}")
    o = canonical_order(x.data, y.data)
    return x.data[o], y.data[o]


def _pearson(a, b):
    a = a - a.mean()
    b = b - b.mean()
    saa, sbb = float(a @ a), float(b @ b)
    if saa <= 0.0 or sbb <= 0.0:
        return None
    return float(np.clip((a @ b) / np.sqrt(saa * sbb), -1.0, 1.0))


def pearson_r2(x, y):
    """Squared Pearson correlation of two univariate samples."""
    a, b = _pair(x, y)
    if a.shape[1] != 1 or b.shape[1] != 1:
        raise DimensionMismatch("squared Pearson correlation needs univariate inputs")
    r = _pearson(a[:, 0], b[:, 0])
    if r is None:
        warnings.warn("constant input; returning 0", DegenerateInputWarning)
        return 0.0
    return r * r


def rdm_cor(x, y):
    """Pearson correlation between the upper triangles of the distance matrices."""
    a, b = _pair(x, y)
    iu = np.triu_indices(a.shape[0], k=1)
    r = _pearson(_distances(a)[iu], _distances(b)[iu])
    if r is None:
        warnings.warn("constant distance vector; returning 0", DegenerateInputWarning)
        return 0.0
    return r


def median_bandwidth(d):
    """Nearest-rank median of the off-diagonal distances."""
    return offdiag_quantile(DistanceMatrix.from_array(d), 0.5)


def hsic(x, y):
    """Biased HSIC, ``trace(K H L H) / m**2``, Gaussian kernels, median bandwidth."""
    a, b = _pair(x, y)
    m = a.shape[0]
    dx, dy = _distances(a), _distances(b)
    sx, sy = median_bandwidth(dx), median_bandwidth(dy)
    if sx <= 0.0 or sy <= 0.0:
        warnings.warn("zero median distance; returning 0", DegenerateInputWarning)
        return 0.0
    k = np.exp(-dx ** 2 / (2.0 * sx ** 2))
    l = np.exp(-dy ** 2 / (2.0 * sy ** 2))
    kc = k - k.mean(axis=0, keepdims=True) - k.mean(axis=1, keepdims=True) + k.mean()
    # trace(K H L H) = sum(HKH * L) for symmetric K, L.
    return max(float(np.sum(kc * l)) / (m * m), 0.0)


class BaselineStatistic:
    """Wrap a baseline function in the statistic-procedure interface."""

    def __init__(self, name, func):
        self.name = name
        self.func = func

    def evaluate(self, x, y):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateInputWarning)
            return self.func(x, y), None

    def __call__(self, x, y):
        return self.evaluate(x, y)[0]


BASELINES = {
    "rdmcor": rdm_cor,
    "r2": pearson_r2,
    "hsic": hsic,
}
