import cmath
import random

import pytest


@pytest.fixture
def rng():
    return random.Random(20260823)


def rand_disc(rng, lo, hi):
    """Random complex number with modulus in [lo, hi]."""
    return rng.uniform(lo, hi) * cmath.exp(2j * cmath.pi * rng.random())


def rand_partition(rng, max_part, max_len):
    n = rng.randint(0, max_len)
    return tuple(sorted((rng.randint(0, max_part) for _ in range(n)), reverse=True))


def rand_signature(rng, lo, hi, length):
    return tuple(sorted((rng.randint(lo, hi) for _ in range(length)), reverse=True))


def relerr(a, b):
    scale = max(abs(a), abs(b))
    if scale == 0:
        return 0.0
    return abs(a - b) / scale
