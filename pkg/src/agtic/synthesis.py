"""Synthetic association patterns, noise ladders, and 2-D combinations.

Function patterns use a latent ``t ~ U[0, 1]`` with ``x = t`` and noise on
``y`` only; the parametric curves (circular, spiral) and the checkerboard
put independent noise on both coordinates. Every deterministic part has
range about ``[0, 1]`` or ``[-1, 1]`` so one noise ladder fits all.

Latent draws and noise draws come from separate substreams of the seed,
so a noisy dataset is exactly its noiseless version plus scaled Gaussian
draws.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import seeding
from .errors import AgticError
from .geometry import MIN_OBSERVATIONS, Sample

LATENT_KEY = 0
NOISE_KEY = 1

_CHECKER_CELLS = np.array([(a, b) for a in range(3) for b in range(3)
                           if (a + b) % 2 == 0])


class PatternId(str, enum.Enum):
    LINEAR = "linear"
    PARABOLIC = "parabolic"
    SIN4PI = "sin4pi"
    SIN16PI = "sin16pi"
    CIRCULAR = "circular"
    CHECKERBOARD = "checkerboard"
    SPIRAL = "spiral"
    STEP = "step"
    EXPONENTIAL = "exponential"
    RANDOM = "random"


# Patterns whose x coordinate is also noisy.
_BIVARIATE_NOISE = {PatternId.CIRCULAR, PatternId.CHECKERBOARD, PatternId.SPIRAL}


@dataclass(frozen=True)
class PatternSpec:
    id: PatternId
    m: int
    sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "id", PatternId(self.id))
        if self.m < MIN_OBSERVATIONS:
            raise AgticError(f"m must be >= {MIN_OBSERVATIONS}, got {self.m}")
        if not math.isfinite(self.sigma) or self.sigma < 0:
            raise AgticError(f"sigma must be finite and >= 0, got {self.sigma}")


@dataclass(frozen=True)
class NoiseLadder:
    sigma_min: float = 0.05
    count: int = 10
    span: float = 10.0

    def __post_init__(self):
        if not self.sigma_min > 0:
            raise AgticError("sigma_min must be positive")
        if self.count < 2:
            raise AgticError("a noise ladder needs at least 2 levels")
        if self.span != 10.0:
            raise AgticError("the ladder span is fixed at 10")


def noise_ladder(ladder=NoiseLadder()):
    """Geometric sequence from ``sigma_min`` to ``10 * sigma_min``."""
    j = np.arange(ladder.count)
    return tuple(float(ladder.sigma_min * 10.0 ** (i / (ladder.count - 1))) for i in j)


def _latent(pid, m, rng):
    """Noiseless ``(x, y)`` coordinates for one pattern."""
    if pid is PatternId.CIRCULAR:
        theta = rng.uniform(0.0, 2.0 * np.pi, m)
        return np.cos(theta), np.sin(theta)
    if pid is PatternId.SPIRAL:
        theta = rng.uniform(0.0, 4.0 * np.pi, m)
        r = theta / (4.0 * np.pi)
        return r * np.cos(theta), r * np.sin(theta)
    if pid is PatternId.CHECKERBOARD:
        cells = _CHECKER_CELLS[rng.integers(0, len(_CHECKER_CELLS), m)]
        u = rng.uniform(0.0, 1.0, (m, 2))
        return (cells[:, 0] + u[:, 0]) / 3.0, (cells[:, 1] + u[:, 1]) / 3.0
    t = rng.uniform(0.0, 1.0, m)
    if pid is PatternId.LINEAR:
        y = t.copy()
    elif pid is PatternId.PARABOLIC:
        y = 4.0 * (t - 0.5) ** 2
    elif pid is PatternId.SIN4PI:
        y = np.sin(4.0 * np.pi * t)
    elif pid is PatternId.SIN16PI:
        y = np.sin(16.0 * np.pi * t)
    elif pid is PatternId.STEP:
        y = (t > 0.5).astype(np.float64)
    elif pid is PatternId.EXPONENTIAL:
        y = np.expm1(5.0 * t) / np.expm1(5.0)
    else:
        y = rng.uniform(0.0, 1.0, m)
    return t, y


def _columns(pid, m, sigma, seed):
    x, y = _latent(pid, m, seeding.substream(seed, LATENT_KEY))
    noise = seeding.substream(seed, NOISE_KEY).standard_normal((2, m))
    if sigma > 0:
        if pid in _BIVARIATE_NOISE:
            x = x + sigma * noise[0]
        y = y + sigma * noise[1]
    return x, y


def generate(spec):
    """Draw ``(x, y)``, each an ``m x 1`` sample, for one pattern."""
    x, y = _columns(spec.id, spec.m, spec.sigma, spec.seed)
    return Sample(x, ("x",)), Sample(y, ("y",))


def generate_combinatorial(id_a, id_b, m, sigma=0.0, seed=0):
    """Two-dimensional ``(x, y)``: column 1 follows ``id_a``, column 2 ``id_b``.

    The two columns use independent substreams of ``seed``.
    """
    spec_a = PatternSpec(id_a, m, sigma, seeding.derive_seed(seed, 0))
    spec_b = PatternSpec(id_b, m, sigma, seeding.derive_seed(seed, 1))
    xa, ya = _columns(spec_a.id, m, sigma, spec_a.seed)
    xb, yb = _columns(spec_b.id, m, sigma, spec_b.seed)
    return (Sample(np.column_stack([xa, xb]), ("x1", "x2")),
            Sample(np.column_stack([ya, yb]), ("y1", "y2")))
