"""Deterministic substream derivation.

Every random draw in the package comes from a generator built by
:func:`substream`. The mixing function is numpy's ``SeedSequence`` with
the master seed as entropy and the integer keys as ``spawn_key``; it is
stable across numpy releases, so results are reproducible for a given
implementation regardless of worker count or execution order.
"""

import numpy as np

MIXING_FUNCTION = "numpy.random.SeedSequence(entropy=seed, spawn_key=keys) -> PCG64"

# Top-level key spaces, kept disjoint so no two consumers share a stream.
PERMUTATION_KEY = 0
NULL_COPY_KEY = 1
DATA_KEY = 2


def substream(seed, *keys):
    """Return a ``numpy.random.Generator`` for ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, *keys):
    """Mix ``(seed, *keys)`` into a single unsigned 64-bit integer seed."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
