"""Seeded random sources used by the runtime.

Two generators, both fixed so that traces are reproducible across platforms
and Python versions:

* :class:`ChoiceStream` resolves ``choose`` bindings.  It draws from CPython's
  MT19937 seeded with the integer seed (``random.Random(seed)``) and maps raw
  bits onto a range by rejection sampling over ``getrandbits``, so only the
  Mersenne Twister output itself is relied upon.
* :func:`counter_draw` feeds seeded stimulus generators.  It hashes
  ``(seed, name, t)`` with BLAKE2b, so any interval can be produced on its
  own without replaying earlier ones.
"""
import hashlib
import random


class ChoiceStream:
    def __init__(self, seed: int):
        self.seed = seed
        self.bits = random.Random(seed).getrandbits

    def draw(self, lo: int, hi: int) -> int:
        """Uniform integer in the inclusive range ``lo..hi``."""
        span = hi - lo + 1
        k = span.bit_length()
        while True:
            x = self.bits(k)
            if x < span:
                return lo + x


def counter_draw(seed: int, name: str, t: int, lo: int, hi: int) -> int:
    span = hi - lo + 1
    counter = 0
    while True:
        h = hashlib.blake2b(f"{seed}:{name}:{t}:{counter}".encode(), digest_size=8)
        x = int.from_bytes(h.digest(), "big")
        # reject the biased tail of the 64-bit range
        limit = (1 << 64) - (1 << 64) % span
        if x < limit:
            return lo + x % span
        counter += 1
