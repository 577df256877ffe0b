"""Seeded 64-bit PRNG: xoshiro256** with a splitmix64-expanded seed.

The algorithm is fixed here rather than borrowed from a library so that
instances and benchmark streams reproduce bit-for-bit on any platform and
any numpy version.  Reference: Blackman & Vigna, "Scrambled linear
pseudorandom number generators" (xoshiro256** 1.0).
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(*parts) -> int:
    """Split function: a 64-bit seed from any sequence of str/int labels.

    Uses BLAKE2b over the ``repr`` of the parts, so the derived seed depends
    only on the labels and never on call order.
    """
    h = hashlib.blake2b(repr(tuple(parts)).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


class Xoshiro256:
    """xoshiro256** generator.

    >>> r = Xoshiro256(0)
    >>> hex(r.next_u64())
    '0x99ec5f36cb75f2b4'
    """

    __slots__ = ("seed", "_s")

    def __init__(self, seed: int = 0):
        if not 0 <= seed <= MASK64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        self.seed = seed
        sm = seed
        words = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            words.append(out)
        self._s = words

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        x = (s1 * 5) & MASK64
        result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
        self._s = [s0, s1, s2, s3]
        return result

    def bits(self, k: int) -> int:
        """Uniform k-bit integer, 0 <= k <= 64, taken from the high bits."""
        if k == 0:
            return 0
        return self.next_u64() >> (64 - k)

    def below(self, bound: int) -> int:
        """Uniform integer in [0, bound) by masked rejection.

        Bounds above 2**64 are served by concatenating draws.
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        k = (bound - 1).bit_length()
        while True:
            if k <= 64:
                x = self.bits(k)
            else:
                x = 0
                left = k
                while left > 0:
                    take = min(64, left)
                    x = (x << take) | self.bits(take)
                    left -= take
            if x < bound:
                return x

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def sample_distinct(self, population: int, k: int) -> list[int]:
        """``k`` distinct integers from range(population), in draw order.

        Partial Fisher-Yates over a virtual pool; only displaced slots are
        stored, so memory is O(k) however large the population.
        """
        if not 0 <= k <= population:
            raise ValueError(f"cannot draw {k} distinct values from {population}")
        moved: dict[int, int] = {}
        out = []
        for i in range(k):
            j = i + self.below(population - i)
            vj = moved.get(j, j)
            moved[j] = moved.get(i, i)
            out.append(vj)
        return out

    def sample_distinct_rejection(self, population: int, k: int) -> list[int]:
        """Same contract as :meth:`sample_distinct`, by rejection against a set."""
        if not 0 <= k <= population:
            raise ValueError(f"cannot draw {k} distinct values from {population}")
        seen: set[int] = set()
        out = []
        while len(out) < k:
            v = self.below(population)
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out
