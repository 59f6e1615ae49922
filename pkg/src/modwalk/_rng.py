"""Seeded, order-independent random streams.

Every trajectory (or fixed-size block of i.i.d. samples) owns a Philox stream
keyed by ``(seed, purpose, index)`` through ``SeedSequence.spawn_key``, so the
output of a run does not depend on how the work is split across workers.
"""

import numpy as np

# purposes: keep distinct so e.g. sign draws never reuse quotient draws
WORDS = 0
INTERVAL_INDICES = 1
QUOTIENTS = 2
STATIONARY = 3
SIGNS = 4

BLOCK = 4096


def stream(seed: int, purpose: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(purpose, index))
    return np.random.Generator(np.random.Philox(ss))


def generator_word(rng: np.random.Generator, n: int) -> list:
    """n i.i.d. uniform indices in 0..8 from 64-bit draws (modular reduction, bias < 2**-60)."""
    if n == 0:
        return []
    return (rng.bit_generator.random_raw(n) % np.uint64(9)).tolist()


def geometric_half(rng: np.random.Generator, shape) -> np.ndarray:
    """Draws with Pr(K = n) = 2**-n, n >= 1."""
    return rng.geometric(0.5, size=shape)


def fair_signs(rng: np.random.Generator, n: int) -> np.ndarray:
    bits = rng.bit_generator.random_raw(n) & np.uint64(1)
    return 1 - 2 * bits.astype(np.int64)
