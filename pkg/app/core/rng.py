"""Seeded, splittable random streams.

Every sampling operation takes a ``RandomStream`` explicitly. Substreams are
derived from the parent's ``SeedSequence`` so that a run is reproducible from
one integer seed regardless of how work is split across threads.
"""

import zlib
from collections.abc import Sequence

import numpy as np


class RandomStream:
    """Thin wrapper over ``numpy.random.Generator`` with named substreams."""

    def __init__(self, seed: int | np.random.SeedSequence = 0) -> None:
        if isinstance(seed, np.random.SeedSequence):
            self._seq = seed
        else:
            self._seq = np.random.SeedSequence(int(seed))
        self._gen = np.random.default_rng(self._seq)

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def child(self, name: str) -> 'RandomStream':
        """Derive a deterministic substream identified by ``name``."""
        key = zlib.crc32(name.encode('utf-8'))
        seq = np.random.SeedSequence(
            self._seq.entropy,
            spawn_key=(*self._seq.spawn_key, key),
        )
        return RandomStream(seq)

    def spawn(self, count: int) -> list['RandomStream']:
        """Derive ``count`` indexed substreams (trial chunks, workers)."""
        base = self.child('spawn')._seq
        return [RandomStream(seq) for seq in base.spawn(count)]

    def digit(self, d: int) -> int:
        return int(self._gen.integers(d))

    def integers(self, low: int, high: int | None = None, size=None):
        return self._gen.integers(low, high, size=size)

    def random(self, size=None):
        return self._gen.random(size)

    def choice(self, n: int, p: Sequence[float] | np.ndarray | None = None) -> int:
        return int(self._gen.choice(n, p=p))

    def sample_positions(self, total: int, count: int) -> list[int]:
        """Uniform random ``count``-subset of ``range(total)``, sorted."""
        if count == 0:
            return []
        picked = self._gen.choice(total, size=count, replace=False)
        return sorted(int(i) for i in picked)

    def standard_complex_normal(self, shape: tuple[int, ...]) -> np.ndarray:
        scale = 1 / np.sqrt(2)
        return self._gen.normal(0, scale, shape) + 1j * self._gen.normal(
            0, scale, shape
        )
