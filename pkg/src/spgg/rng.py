"""Deterministic random streams for the engine and the sweep harness.

A fixed PCG32 generator is implemented by hand (rather than wrapping
numpy's Generator) so that the pure-Python reference path and the
compiled kernel can consume bit-identical streams, and so replica seeds
can be derived injectively from (base seed, grid index, replica index).
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
MASK32 = (1 << 32) - 1

_PCG_MULT = 6364136223846793005
_GOLDEN = 0x9E3779B97F4A7C15
_SEQ_SALT = 0xDA3E39CB94B95BDB

_INV_2_32 = 2.0**-32


def mix64(x: int) -> int:
    """SplitMix64 finalizer step: a bijection on 64-bit integers."""
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, grid_index: int, replica_index: int) -> int:
    """Derive the seed for one run of a sweep.

    Injective in (grid_index, replica_index) for a fixed base seed: the
    two indices are packed into disjoint 32-bit halves and pushed through
    a bijective mixer, so no two runs of a sweep can share a stream.
    """
    if not (0 <= grid_index < 2**32):
        raise ValueError(f"grid_index {grid_index} out of 32-bit range")
    if not (0 <= replica_index < 2**32):
        raise ValueError(f"replica_index {replica_index} out of 32-bit range")
    return mix64(mix64(base_seed & MASK64) ^ ((grid_index << 32) | replica_index))


class Pcg32:
    """PCG-XSH-RR: 64-bit state, odd stream increment, 32-bit output."""

    __slots__ = ("state", "inc")

    def __init__(self, seed: int):
        seed &= MASK64
        self._seed_raw(mix64(seed), mix64(seed ^ _SEQ_SALT))

    @classmethod
    def from_state_seq(cls, initstate: int, initseq: int) -> "Pcg32":
        """Seed directly from the canonical (initstate, initseq) pair."""
        rng = cls.__new__(cls)
        rng._seed_raw(initstate & MASK64, initseq & MASK64)
        return rng

    def _seed_raw(self, initstate: int, initseq: int) -> None:
        self.state = 0
        self.inc = ((initseq << 1) | 1) & MASK64
        self.next_u32()
        self.state = (self.state + initstate) & MASK64
        self.next_u32()

    def next_u32(self) -> int:
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & MASK64
        xorshifted = (((old >> 18) ^ old) >> 27) & MASK32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & MASK32

    def uniform(self) -> float:
        """Uniform double in [0, 1) with 32-bit resolution."""
        return self.next_u32() * _INV_2_32

    def below(self, n: int) -> int:
        """Exactly uniform integer in [0, n), by masked rejection."""
        if n <= 0:
            raise ValueError("n must be positive")
        mask = (1 << (n - 1).bit_length()) - 1
        while True:
            v = self.next_u32() & mask
            if v < n:
                return v

    def state_vector(self) -> np.ndarray:
        """(state, inc) pair in the layout the compiled kernel consumes."""
        return np.array([self.state, self.inc], dtype=np.uint64)

    def set_state_vector(self, vec) -> None:
        self.state = int(vec[0]) & MASK64
        self.inc = int(vec[1]) & MASK64
