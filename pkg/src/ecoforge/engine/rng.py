"""Deterministic 64-bit PRNG (xoshiro256** family) with derived substreams.

Pure integer arithmetic, so sequences are bit-identical across platforms
and Python builds. Each simulation entity group (population or pool)
draws from its own substream; substream seeds are derived from the
master seed by fixed golden-ratio offsets, so adding draws in one group
never shifts another group's sequence.
"""

from __future__ import annotations

import math

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15


def mix64(value: int) -> int:
    """SplitMix64 finalizer; a strong 64-bit bijective hash."""
    z = value & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def substream_seed(master_seed: int, index: int) -> int:
    return mix64((master_seed + (index + 1) * GOLDEN64) & MASK64)


def reset_seed(master_seed: int, reset_count: int) -> int:
    """Fresh master seed for the nth reset of a run configuration."""
    return mix64((master_seed ^ (reset_count * 0xD1342543DE82EF95)) & MASK64)


class Xoshiro256StarStar:
    """xoshiro256** generator seeded through a SplitMix64 expansion."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & MASK64
        words = []
        for _ in range(4):
            state = (state + GOLDEN64) & MASK64
            words.append(mix64(state))
        if not any(words):
            words[0] = 1
        self.s0, self.s1, self.s2, self.s3 = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        tmp = (s1 * 5) & MASK64
        result = (((tmp << 7) | (tmp >> 57)) & MASK64) * 9 & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). n must be >= 1."""
        value = int(self.random() * n)
        return n - 1 if value >= n else value

    def poisson(self, lam: float) -> int:
        """Knuth's product-of-uniforms sampler; exact and deterministic.

        Always consumes at least one draw (lam == 0 consumes exactly one),
        which keeps draw counts predictable for trace equivalence.
        """
        if lam < 0:
            raise ValueError("poisson rate must be >= 0")
        limit = math.exp(-lam)
        k = 0
        product = self.random()
        while product > limit:
            k += 1
            product *= self.random()
        return k

    def getstate(self) -> tuple[int, int, int, int]:
        return (self.s0, self.s1, self.s2, self.s3)

    def setstate(self, state: tuple[int, int, int, int]) -> None:
        self.s0, self.s1, self.s2, self.s3 = state
