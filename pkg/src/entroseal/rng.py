"""Seedable randomness source producing fixed-width bit strings."""

from __future__ import annotations

import random

from .errors import EntropyError, PreconditionError
from .gf2 import BitPoly


class RandomSource:
    """Uniform bit-string generator.

    With a seed, draws come from a deterministic PRNG and are reproducible
    across runs; without one, from the platform entropy source. Security
    statements assume the unseeded mode; seeding exists for tests and for
    pinned golden vectors.
    """

    def __init__(self, seed: int | None = None):
        self.seed = seed
        if seed is None:
            self._rng: random.Random = random.SystemRandom()
        else:
            self._rng = random.Random(seed)

    def bits(self, nbits: int) -> BitPoly:
        """A uniform BitPoly of exactly nbits bits (nbits = 0 is legal)."""
        if nbits < 0:
            raise PreconditionError("bit count must be nonnegative")
        if nbits == 0:
            return BitPoly(0, 0)
        try:
            value = self._rng.getrandbits(nbits)
        except Exception as exc:  # pragma: no cover - platform failure
            raise EntropyError(f"entropy source failed: {exc}") from exc
        return BitPoly(value, nbits)

    def __repr__(self) -> str:
        tag = "system" if self.seed is None else f"seed={self.seed}"
        return f"RandomSource({tag})"
