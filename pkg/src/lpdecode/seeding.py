"""Deterministic stream derivation shared across modules.

The project-wide randomness contract: a (master_seed, stream_id) pair maps
to one counter-based Philox stream, and composite experiments derive child
stream ids with the splitmix64 mixer below.  Both mappings are frozen so
that artifacts are byte-stable across runs, machines and execution order.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One round of the splitmix64 output function (public-domain constants)."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*values: int) -> int:
    """Mix any number of integers into one 63-bit stream id.

    Order-sensitive; negative inputs are folded through their two's
    complement image so Python ints of any sign are accepted.
    """
    h = 0
    for v in values:
        h = splitmix64(h ^ (int(v) & _MASK64))
    return h & (_MASK64 >> 1)


def generator_from(master_seed: int, stream_id: int) -> np.random.Generator:
    """The Philox stream owned by a (master_seed, stream_id) pair."""
    seq = np.random.SeedSequence(entropy=int(master_seed) & _MASK64, spawn_key=(int(stream_id),))
    return np.random.Generator(np.random.Philox(seq))
