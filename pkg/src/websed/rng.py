"""Seeded shuffling on a fully specified PRNG.

Dataset splits and evaluator assignments must be reproducible from a seed
alone, independent of any library's generator internals. This module pins
the generator to the Knuth MMIX 64-bit linear congruential recurrence

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2^64

and a Fisher-Yates shuffle drawing indices as ``next_u64() % (i + 1)``.
Any implementation, in any language, that follows these two definitions
reproduces the same permutations bit for bit.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_MUL = 6364136223846793005
_INC = 1442695040888963407


class Lcg64:
    """Knuth MMIX linear congruential generator."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (_MUL * self.state + _INC) & _MASK64
        return self.state

    def next_below(self, n: int) -> int:
        """Integer in [0, n). Modulo reduction, kept for cross-language parity."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle, iterating from the last index down."""
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]
