"""Seeded random streams.

Every run owns one :class:`RandomSource`.  The stream is a PCG64 generator
keyed by ``(master_seed, stream_id)`` through numpy's SeedSequence spawn
keys, so run ``i`` draws the same numbers no matter which worker executes it
or in which order.

The compiled kernels read the very same bit generator through its C
capsule.  To keep both backends in lockstep every draw used by a search loop
is expressed in terms of three primitives:

* ``random()``     - one 53-bit double from one 64-bit word
* ``integer(n)``   - Lemire's multiply/reject method on 64-bit words
* ``binomial(n,p)`` - numpy's own sampler (inversion for np <= 30, BTPE above)
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


class RandomSource:
    """Deterministic random stream for one run."""

    def __init__(self, master_seed: int, stream_id: int = 0):
        master_seed = int(master_seed)
        stream_id = int(stream_id)
        if not 0 <= master_seed <= _MASK64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if stream_id < 0:
            raise ValueError("stream_id must be non-negative")
        self.master_seed = master_seed
        self.stream_id = stream_id
        seq = np.random.SeedSequence(master_seed, spawn_key=(stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(seq))
        self._raw = self.generator.bit_generator.random_raw

    def __repr__(self):
        return f"RandomSource(master_seed={self.master_seed}, stream_id={self.stream_id})"

    def raw(self) -> int:
        """Next raw 64-bit word."""
        return int(self._raw())

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return self.generator.random()

    def integer(self, n: int) -> int:
        """Uniform integer in [0, n)."""
        if n <= 0:
            raise ValueError("n must be positive")
        m = int(self._raw()) * n
        low = m & _MASK64
        if low < n:
            t = ((1 << 64) - n) % n
            while low < t:
                m = int(self._raw()) * n
                low = m & _MASK64
        return m >> 64

    def binomial(self, n: int, p: float) -> int:
        if not 0.0 <= p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        return int(self.generator.binomial(n, p))

    def bits(self, n: int) -> np.ndarray:
        """n uniform bits taken from ceil(n/64) words, low bit first."""
        words = self._raw(size=(n + 63) // 64).astype("<u8")
        return np.unpackbits(words.view(np.uint8), bitorder="little")[:n].copy()

    def permutation(self, n: int) -> np.ndarray:
        """Uniform permutation of range(n) by Fisher-Yates."""
        perm = np.arange(n, dtype=np.int64)
        for i in range(n - 1, 0, -1):
            j = self.integer(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def sample_distinct(self, n: int, k: int) -> list[int]:
        """k distinct positions out of range(n) (Floyd's algorithm).

        The output order is part of the contract: the compiled kernels
        produce the same list for the same stream state.
        """
        if not 0 <= k <= n:
            raise ValueError(f"cannot pick {k} distinct positions out of {n}")
        chosen: list[int] = []
        seen = set()
        for j in range(n - k, n):
            t = self.integer(j + 1)
            if t in seen:
                t = j
            seen.add(t)
            chosen.append(t)
        return chosen
