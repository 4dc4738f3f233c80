"""Deterministic random numbers, portable across platforms and runs.

Two small generators cover every random decision in the simulator:
splitmix64 expands seeds and derives independent substream seeds, and
xoshiro256** produces the actual draws.  Both are pure integer
arithmetic on 64-bit words, so sequences are reproducible anywhere.
No module ever touches ambient randomness.
"""

from __future__ import annotations

from typing import List, Sequence, TypeVar

MASK64 = 0xFFFFFFFFFFFFFFFF

T = TypeVar("T")


def splitmix64(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state once; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    z = z ^ (z >> 31)
    return state, z


def derive_seed(base: int, *stream: int) -> int:
    """Derive a substream seed from a base seed and integer path.

    Folding each path element through splitmix64 keeps sibling streams
    (world layout, network jitter, per-agent decisions) statistically
    independent while remaining a pure function of the user seed.
    """
    state = base & MASK64
    out = 0
    for part in stream:
        state, out = splitmix64((state ^ (part & MASK64)) & MASK64)
    if not stream:
        state, out = splitmix64(state)
    return out


class Xoshiro256StarStar:
    """xoshiro256** 1.0, seeded via splitmix64 so any 64-bit seed works."""

    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, seed: int):
        state = seed & MASK64
        state, self.s0 = splitmix64(state)
        state, self.s1 = splitmix64(state)
        state, self.s2 = splitmix64(state)
        state, self.s3 = splitmix64(state)

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s1 * 5) & MASK64
        result = (((x << 7) | (x >> 57)) & MASK64) * 9 & MASK64
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
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n).

        Draws 64 bits and reduces modulo n; the bias is below 2**-50
        for any n this simulator uses, far under observable effect.
        """
        if n <= 0:
            raise ValueError("randrange() bound must be positive")
        return self.next_u64() % n

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.randrange(len(seq))]

    def shuffle(self, items: List[T]) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randrange(i + 1)
            items[i], items[j] = items[j], items[i]

    def spawn(self) -> "Xoshiro256StarStar":
        """Child generator whose stream is independent of later draws."""
        return Xoshiro256StarStar(self.next_u64())
