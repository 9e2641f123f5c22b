"""Deterministic pseudo-random streams for the simulation engine.

The generator is SplitMix64, a counter-based 64-bit generator: output ``i``
of a stream with initial state ``s`` is ``finalize(s + (i+1)*GOLDEN)`` where
``finalize`` is the SplitMix64 avalanche function. All arithmetic is modulo
2**64, so the stream is identical on every platform and in every
implementation (the numba kernels inline the same constants).

Stream splitting
----------------
Independent substreams are derived with :func:`derive_stream`:

    derive_stream(seed, i) == finalize(seed + (i+1)*GOLDEN)

i.e. substream ``i`` of ``seed`` is seeded with the ``i``-th output of the
SplitMix64 sequence started at ``seed``. This is the rule used for per-trial
seeds inside ``estimate_rate`` and for per-point seeds inside ``sweep``.

Uniform doubles take the top 53 bits of an output: ``(z >> 11) * 2**-53``,
giving values in [0, 1).
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX_A = 0xBF58476D1CE4E5B9
MIX_B = 0x94D049BB133111EB
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


def finalize(z: int) -> int:
    """SplitMix64 avalanche function on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * MIX_B) & MASK64
    return (z ^ (z >> 31)) & MASK64


def derive_stream(seed: int, index: int) -> int:
    """Seed for substream `index` of `seed` (the documented split rule)."""
    if index < 0:
        raise ValueError("stream index must be non-negative")
    return finalize((seed + (index + 1) * GOLDEN) & MASK64)


class SplitMix64:
    """Sequential view of a SplitMix64 stream.

    Used by the pure-Python reference engine; the numba kernels advance the
    same state with identical arithmetic, so both engines consume one shared
    stream definition.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return finalize(self.state)

    def uniform(self) -> float:
        """Next double in [0, 1)."""
        return (self.next_u64() >> 11) * _INV53

    def bernoulli(self, p: float) -> bool:
        return self.uniform() < p
