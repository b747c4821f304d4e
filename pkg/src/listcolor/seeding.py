"""Counter-based seed derivation.

Child seeds are produced with the SplitMix64 finalizer so experiments can be
reproduced bit-exactly from any language::

    GOLDEN = 0x9E3779B97F4A7C15
    child(base, i) = mix64((base + GOLDEN * (i + 1)) mod 2**64)

    mix64(z):
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
        return z ^ (z >> 31)

``mix64`` is a bijection on 64-bit words and ``i -> base + GOLDEN*(i+1)`` is
injective for ``i < 2**64``, so children of one base are pairwise distinct.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def child_seed(base: int, index: int) -> int:
    """Seed of stream ``index`` derived from ``base``."""
    if index < 0:
        raise ValueError("index must be non-negative")
    return mix64((base & MASK64) + GOLDEN * (index + 1))


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(None if seed is None else seed & MASK64)
