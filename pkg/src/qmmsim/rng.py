"""Deterministic 64-bit PRNG (splitmix64).

All randomness in the package flows from a single config seed through this
generator, so outputs are reproducible across builds and platforms that
agree on the algorithm.  splitmix64 reference: Steele, Lea & Flood,
"Fast splittable pseudorandom number generators" (the standard constants).
"""

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed):
    """Yield an endless stream of uint64 values from ``seed``."""
    state = int(seed) & _MASK
    while True:
        state = (state + _GAMMA) & _MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        yield z ^ (z >> 31)


def sign_pattern(seed, n):
    """Deterministic array of n values in {-1.0, +1.0} from the top bit."""
    gen = splitmix64(seed)
    return np.array([1.0 if (next(gen) >> 63) == 0 else -1.0 for _ in range(n)])


def uniform01(seed, n):
    """Deterministic array of n doubles in [0, 1) (53-bit mantissa)."""
    gen = splitmix64(seed)
    return np.array([(next(gen) >> 11) * (1.0 / (1 << 53)) for _ in range(n)])
