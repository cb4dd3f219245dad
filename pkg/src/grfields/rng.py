"""The single source of randomness.

Every sampler draws from a Philox counter-based bit generator keyed by
``(seed, stream)``, so a given seed yields the same stream on every platform.
"""

import numpy as np

DEFAULT_SEED = 20250101


def generator(seed=DEFAULT_SEED, stream=0):
    """Return a ``numpy.random.Generator`` backed by Philox for ``(seed, stream)``."""
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def standard_normal(seed, shape, stream=0):
    return generator(seed, stream).standard_normal(shape)
