"""Reproducible random streams for initial conditions.

The generator is a counter-style splitmix64, chosen so the sequence is
specified by an algorithm rather than a library:

* stream initial state: ``mix64((seed + (stream + 1) * GAMMA) mod 2**64)``
* advance: ``state = (state + GAMMA) mod 2**64``, output ``mix64(state)``
* ``mix64(z)``: ``z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27;
  z *= 0x94D049BB133111EB; z ^= z>>31`` (all mod 2**64)
* uniform double in [0,1): ``(output >> 11) * 2**-53``

with ``GAMMA = 0x9E3779B97F4A7C15``.  Each random initial condition consumes
two uniforms: ``s = 3*u1`` and ``theta = pi*u2 - pi/2``.  Parallel tasks use
distinct ``stream`` indices of the same 64-bit seed.

This module is the plain-Python reference; the compiled kernels implement
the identical arithmetic on uint64 (tested for equality).
"""

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, stream: int = 0) -> int:
    return mix64((seed + (stream + 1) * GAMMA) & MASK64)


class Stream:
    """One random stream: ``Stream(seed, stream).next_unit() -> [0, 1)``."""

    def __init__(self, seed: int, stream: int = 0):
        self.state = stream_state(seed, stream)

    def next_u64(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def next_unit(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def next_phase_point(self) -> tuple:
        """(s, theta) uniform in (0,3) x (-pi/2, pi/2); two draws."""
        import math

        u1 = self.next_unit()
        u2 = self.next_unit()
        return 3.0 * u1, math.pi * u2 - math.pi / 2.0
