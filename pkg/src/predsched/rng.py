"""Pinned pseudo-random generator for reproducible experiments.

xoshiro256** seeded through splitmix64, with bounded draws by rejection
sampling. Everything is plain integer arithmetic, so streams are identical on
every platform and Python version, unlike ``random`` or numpy's samplers whose
derived methods are allowed to change between releases.
"""

from __future__ import annotations

from typing import MutableSequence, Sequence

MASK64 = (1 << 64) - 1


def splitmix64(state: int) -> tuple[int, int]:
    """One splitmix64 step: returns ``(new_state, output)``."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Mix integer keys into a seed to obtain an independent substream seed."""
    state = seed & MASK64
    for key in keys:
        state, out = splitmix64(state ^ (key & MASK64))
        state = out
    _, out = splitmix64(state)
    return out


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256:
    """xoshiro256** 1.0 (Blackman & Vigna)."""

    def __init__(self, seed: int = 0):
        state = seed & MASK64
        words = []
        for _ in range(4):
            state, out = splitmix64(state)
            words.append(out)
        self._s = words

    def next_u64(self) -> int:
        s = self._s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def randbelow(self, n: int) -> int:
        """Uniform integer in ``[0, n)``; unbiased via rejection."""
        if n <= 0:
            raise ValueError("randbelow requires n > 0")
        if n == 1:
            return 0
        bits = (n - 1).bit_length()
        while True:
            x = self.next_u64() >> (64 - bits) if bits <= 64 else self._wide(bits)
            if x < n:
                return x

    def _wide(self, bits: int) -> int:
        x = 0
        for _ in range((bits + 63) // 64):
            x = (x << 64) | self.next_u64()
        return x >> (-bits % 64)

    def shuffle(self, items: MutableSequence) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample(self, population: Sequence, k: int) -> list:
        """``k`` distinct elements by a partial Fisher-Yates pass, in draw order."""
        if not 0 <= k <= len(population):
            raise ValueError(f"sample size {k} out of range for population {len(population)}")
        pool = list(population)
        n = len(pool)
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]
