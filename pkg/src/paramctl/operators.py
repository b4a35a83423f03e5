"""Variation operators on bit strings and integer strings.

Genotypes are plain numpy arrays: ``uint8`` for bit strings, ``int64`` for
strings over ``[0..r-1]``.  Operators never modify their input.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .rng import RandomSource

INTERVAL_CLAMP = "clamp"
RING_WRAP = "wrap"


def as_bits(x) -> np.ndarray:
    return np.asarray(x, dtype=np.uint8)


def hamming(x, y) -> int:
    x, y = as_bits(x), as_bits(y)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    return int(np.count_nonzero(x != y))


def flip_positions(x, positions) -> np.ndarray:
    """Toggle the listed positions in order (repeated positions cancel)."""
    y = as_bits(x).copy()
    for i in positions:
        y[i] ^= 1
    return y


def flip_k_distinct(x, k: int, rng: RandomSource) -> np.ndarray:
    x = as_bits(x)
    n = x.size
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside [0, {n}]")
    return flip_positions(x, rng.sample_distinct(n, k))


def standard_bit_mutation(x, p: float, rng: RandomSource) -> np.ndarray:
    """Flip every bit independently with probability p.

    Sampled as K ~ Bin(n, p) followed by K distinct uniform positions, which
    has exactly the same distribution and costs O(K) draws.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("mutation rate must lie in [0, 1]")
    x = as_bits(x)
    k = rng.binomial(x.size, p)
    return flip_positions(x, rng.sample_distinct(x.size, k))


def two_bit_flip_with_replacement(x, rng: RandomSource) -> np.ndarray:
    """Flip bit i, then bit j, with i and j drawn independently."""
    x = as_bits(x)
    n = x.size
    if n < 1:
        raise ValueError("empty bit string")
    i = rng.integer(n)
    j = rng.integer(n)
    return flip_positions(x, (i, j))


def biased_uniform_crossover(x, x2, c: float, rng: RandomSource) -> np.ndarray:
    """Take each bit from ``x2`` with probability c, otherwise from ``x``."""
    x, x2 = as_bits(x), as_bits(x2)
    if x.shape != x2.shape:
        raise ValueError("length mismatch")
    if not 0.0 <= c <= 1.0:
        raise ValueError("crossover bias must lie in [0, 1]")
    take = rng.generator.random(x.size) < c
    return np.where(take, x2, x).astype(np.uint8)


def step_value(value: int, step: int, r: int, boundary: str) -> int:
    if boundary == RING_WRAP:
        return (value + step) % r
    return min(max(value + step, 0), r - 1)


def component_step(x, i: int, v: float, rng: RandomSource, r: int,
                   boundary: str = INTERVAL_CLAMP) -> np.ndarray:
    """Move coordinate i by -floor(v) or +floor(v) with probability 1/2 each.

    Out-of-range candidates are clamped to [0, r-1] or wrapped modulo r.
    """
    x = np.asarray(x, dtype=np.int64)
    if not 0 <= i < x.size:
        raise ValueError(f"index {i} out of range")
    step = int(np.floor(v))
    if step < 1:
        raise ValueError("velocity must be at least 1")
    if boundary not in (INTERVAL_CLAMP, RING_WRAP):
        raise ValueError(f"unknown boundary handling {boundary!r}")
    if rng.random() < 0.5:
        step = -step
    y = x.copy()
    y[i] = step_value(int(x[i]), step, r, boundary)
    return y


@dataclass
class TaggedIndividual:
    """A genotype carrying its own parameter value (e.g. a mutation rate)."""
    genotype: np.ndarray
    tag: Any
    fitness: float | None = None
