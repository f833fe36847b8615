"""Deterministic, splittable pseudo-random streams.

Every stream is a SplitMix64 counter generator: the i-th 64-bit output of a
stream with key ``k`` is ``mix64(k + i * GAMMA)`` (i = 1, 2, ...).  Because an
output depends only on (key, counter), blocks of outputs are produced with
vectorised uint64 arithmetic and the sequence is identical on every platform.

Keys are derived from a master seed and a label (a tuple of 64-bit integers)
by folding each label entry through the avalanche mixer, so ``derive(s, (1, 2))``
and ``derive(s, (2, 1))`` are unrelated streams.
"""

from __future__ import annotations

from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB
_SEED_SALT = 0x5851F42D4C957F2D

_U64 = np.uint64


class Purpose(IntEnum):
    """Purpose tags appended to stream labels."""

    BOOTSTRAP = 1
    SUBSET = 2
    GENERATE = 3
    SPLIT = 4
    TREE = 5


def mix64(z: int) -> int:
    """SplitMix64 finaliser on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MUL1) & MASK64
    z = ((z ^ (z >> 27)) * _MUL2) & MASK64
    return z ^ (z >> 31)


def mix64_array(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finaliser applied elementwise to a uint64 array."""
    z = np.asarray(z, dtype=_U64)
    z = (z ^ (z >> _U64(30))) * _U64(_MUL1)
    z = (z ^ (z >> _U64(27))) * _U64(_MUL2)
    return z ^ (z >> _U64(31))


def derive_key(master_seed: int, label: Iterable[int]) -> int:
    key = mix64((master_seed & MASK64) ^ _SEED_SALT)
    for position, entry in enumerate(label):
        key = mix64(key ^ mix64((entry & MASK64) + (position + 1) * GAMMA))
    return key


def derive(master_seed: int, label: Sequence[int]) -> "RngStream":
    """Build the stream for ``(master_seed, label)``; ``label`` must be non-empty."""
    label = tuple(int(v) for v in label)
    if not label:
        raise ValueError("stream label must be non-empty")
    return RngStream(derive_key(int(master_seed), label))


class RngStream:
    """Single-owner stream of 64-bit outputs with uniform/index/gaussian helpers."""

    __slots__ = ("key", "counter", "_cached_gaussian")

    def __init__(self, key: int):
        self.key = key & MASK64
        self.counter = 0
        self._cached_gaussian: float | None = None

    def __repr__(self) -> str:
        return f"RngStream(key={self.key:#018x}, counter={self.counter})"

    def next_u64_block(self, k: int) -> np.ndarray:
        """Next ``k`` raw outputs as a uint64 array."""
        start = self.counter + 1
        self.counter += k
        # counter * GAMMA wraps mod 2**64 exactly as the scalar definition does
        idx = np.arange(start, start + k, dtype=_U64)
        with np.errstate(over="ignore"):
            z = _U64(self.key) + idx * _U64(GAMMA)
            return mix64_array(z)

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * GAMMA)

    def uniforms(self, k: int) -> np.ndarray:
        """``k`` doubles in [0, 1) built from the top 53 bits of each output."""
        return (self.next_u64_block(k) >> _U64(11)).astype(np.float64) * 2.0**-53

    def next_uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def indices(self, k: int, size: int) -> np.ndarray:
        """``size`` unbiased integers in [0, k).

        Outputs below ``2**64 mod k`` are rejected; rejected slots are refilled
        in order from further outputs.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        out = self.next_u64_block(size)
        threshold = (1 << 64) % k
        if threshold:
            bad = np.flatnonzero(out < _U64(threshold))
            while bad.size:
                out[bad] = self.next_u64_block(bad.size)
                bad = bad[out[bad] < _U64(threshold)]
        return (out % _U64(k)).astype(np.int64)

    def next_index(self, k: int) -> int:
        if k < 1:
            raise ValueError("k must be >= 1")
        threshold = (1 << 64) % k
        while True:
            z = self.next_u64()
            if z >= threshold:
                return z % k

    def next_gaussian(self) -> float:
        return float(self.gaussians(1)[0])

    def gaussians(self, size: int) -> np.ndarray:
        """``size`` standard normals by Box-Muller.

        Each pair of uniforms yields a cosine and a sine normal; an unused sine
        half is cached and served first on the next call, so one call of size
        ``a + b`` equals a call of size ``a`` followed by one of size ``b``.
        """
        out = np.empty(size, dtype=np.float64)
        pos = 0
        if size and self._cached_gaussian is not None:
            out[0] = self._cached_gaussian
            self._cached_gaussian = None
            pos = 1
        remaining = size - pos
        pairs = (remaining + 1) // 2
        if pairs:
            u = self.uniforms(2 * pairs).reshape(pairs, 2)
            r = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))
            theta = 2.0 * np.pi * u[:, 1]
            both = np.column_stack([r * np.cos(theta), r * np.sin(theta)]).ravel()
            out[pos:] = both[:remaining]
            if remaining % 2:
                self._cached_gaussian = float(both[-1])
        return out
