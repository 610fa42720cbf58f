"""Deterministic pseudo-random streams for reproducible simulation.

Every stochastic draw in a simulation comes from a splitmix64 stream whose
64-bit key is derived with :func:`mix64` from the trial seed plus a role tag
and an index (production unit number, gate node id, factory sweep point).
The generator is fixed on purpose: splitmix64 uses only 64-bit integer
arithmetic, so the same key yields the same sequence on every platform and
Python version, which is what makes traces bit-reproducible.

Streams are tiny value objects and share no state, so trials, units and
sweep cells can be simulated in any order (or concurrently) without
changing any result.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    # splitmix64 output scrambler (Steele, Lea, Flood 2014).
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix64(*parts: int) -> int:
    """Fold any number of integers into one well-mixed 64-bit key.

    Used to derive substream keys, e.g. ``mix64(base_seed, F, trial)`` for a
    sweep trial or ``mix64(trial_seed, tag, node_id)`` for a gate's private
    stream. Negative and oversized inputs are reduced modulo 2**64 first.
    """
    acc = 0
    for part in parts:
        acc = _finalize((acc + _GOLDEN + (part & _MASK64)) & _MASK64)
    return acc


class Stream:
    """A splitmix64 sequence seeded at ``key``.

    >>> Stream(1).next_u64() == Stream(1).next_u64()
    True
    """

    __slots__ = ("_state",)

    def __init__(self, key: int) -> None:
        self._state = key & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _finalize(self._state)

    def uniform(self) -> float:
        """A float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def chance(self, p: float) -> bool:
        """True with probability ``p``. Never draws when p is 0 or 1."""
        if p <= 0.0:
            return False
        if p >= 1.0:
            return True
        return self.uniform() < p
