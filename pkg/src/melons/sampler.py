"""Exact uniform sampling of watermelons by sequential completion counts.

At each time step every admissible joint move is weighted by the number of
ways to finish the watermelon from the resulting state, and one is chosen
with exact integer arithmetic.  The product of the conditional probabilities
telescopes to ``1 / count_total``, so draws are exactly uniform.

Random numbers: numpy's PCG64, one independent stream per draw, seeded by
``SeedSequence(seed, spawn_key=(draw_index,))``.  A draw depends only on
``(seed, draw_index)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exact import PathFamily, WatermelonSpec, ballot_count, compute_height, det_exact


@dataclass(frozen=True)
class SamplerConfig:
    spec: WatermelonSpec
    seed: int
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class EmpiricalStats:
    histogram: dict[int, int]
    sample_mean: float
    sample_var: float
    count: int


@lru_cache(maxsize=1 << 16)
def _completions(positions: tuple[int, ...], remaining: int) -> int:
    p = len(positions)
    if any(y < 0 for y in positions):
        return 0
    m = [[ballot_count(positions[i], 2 * j, remaining) for j in range(p)] for i in range(p)]
    return det_exact(m)


def completions(positions, tau: int, spec: WatermelonSpec) -> int:
    """Number of ways to complete a watermelon from ``positions`` at time ``tau``."""
    positions = tuple(int(y) for y in positions)
    if len(positions) != spec.p:
        raise ValueError("need one position per branch")
    if not 0 <= tau <= 2 * spec.n:
        raise ValueError("tau out of range")
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise ValueError("positions must be strictly increasing")
    return _completions(positions, 2 * spec.n - tau)


class _RawStream:
    """Buffered 64-bit words from one PCG64 stream."""

    def __init__(self, seed: int, index: int):
        ss = np.random.SeedSequence(seed, spawn_key=(index,))
        self._bits = np.random.PCG64(ss)
        self._buf: list[int] = []

    def word(self) -> int:
        if not self._buf:
            self._buf = self._bits.random_raw(256).tolist()[::-1]
        return self._buf.pop()

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection from 64-bit blocks."""
        blocks = max(1, (bound.bit_length() + 63) // 64)
        span = 1 << (64 * blocks)
        limit = span - span % bound
        while True:
            x = 0
            for _ in range(blocks):
                x = (x << 64) | self.word()
            if x < limit:
                return x % bound


@lru_cache(maxsize=1 << 16)
def _transitions(pos: tuple[int, ...], remaining: int) -> tuple[int, tuple[tuple[int, tuple[int, ...], tuple[int, ...]], ...]]:
    """Total weight and ``(weight, move, new_state)`` options one step ahead."""
    p = len(pos)
    options = []
    for mv in itertools.product((-1, 1), repeat=p):
        new = tuple(y + d for y, d in zip(pos, mv))
        if new[0] < 0 or any(new[i] >= new[i + 1] for i in range(p - 1)):
            continue
        w = _completions(new, remaining - 1)
        if w:
            options.append((w, mv, new))
    total = sum(w for w, _, _ in options)
    assert total == _completions(pos, remaining), "weights must sum to the completion count"
    return total, tuple(options)


def _draw(spec: WatermelonSpec, stream: _RawStream) -> PathFamily:
    p, n = spec.p, spec.n
    pos = tuple(2 * i for i in range(p))
    length = 2 * n
    history = []
    for tau in range(length):
        total, options = _transitions(pos, length - tau)
        u = stream.below(total)
        for w, mv, new in options:
            if u < w:
                break
            u -= w
        history.append(mv)
        pos = new
    steps = tuple(zip(*history)) if history else tuple(() for _ in range(p))
    return PathFamily(spec, steps)


def sample_watermelon(cfg: SamplerConfig, index: int = 0) -> PathFamily:
    """Draw number ``index`` of the stream defined by ``cfg.seed``."""
    return _draw(cfg.spec, _RawStream(cfg.seed, index))


def sample_many(cfg: SamplerConfig) -> list[PathFamily]:
    return [sample_watermelon(cfg, i) for i in range(cfg.count)]


def empirical_height(cfg: SamplerConfig) -> EmpiricalStats:
    """Height histogram, mean and unbiased variance over ``cfg.count`` draws."""
    hist: dict[int, int] = {}
    for i in range(cfg.count):
        h = compute_height(sample_watermelon(cfg, i))
        hist[h] = hist.get(h, 0) + 1
    n = cfg.count
    mean = math.fsum(h * c for h, c in hist.items()) / n
    var = (math.fsum(c * (h - mean) ** 2 for h, c in hist.items()) / (n - 1)) if n > 1 else 0.0
    return EmpiricalStats(dict(sorted(hist.items())), mean, var, n)
