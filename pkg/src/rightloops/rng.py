"""Deterministic pseudo-random numbers for sampled searches.

splitmix64 with the standard update: the state advances by the golden-gamma
constant 0x9E3779B97F4A7C15 (mod 2**64) and the output is the finalizer

    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

all mod 2**64.  Bounded draws use the output modulo the range size; the tiny
modulo bias is irrelevant here, bit-exact reproducibility across platforms is
the point.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """Stateful splitmix64 stream seeded with a 64-bit unsigned integer."""

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("range size must be positive")
        return self.next_u64() % n
