"""Deterministic RNG stream derivation for reproducible parallel simulation.

Every stochastic operation draws from a generator keyed by an explicit
(seed, path...) tuple, so results depend only on the seed and the logical
position of the draw, never on execution order or worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream", "prf_uniform"]


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator keyed by (seed, *path).

    Path components must be non-negative ints below 2**32 (replicate
    indices, pair indices, small namespace tags).
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(path)))


def prf_uniform(seed: int, *path: int | str) -> float:
    """Uniform in (0, 1) keyed by (seed, *path), via SHA-256.

    Used for common-random-numbers scoring: the same (seed, replicate,
    player) always yields the same uniform regardless of which other
    players were selected around it.
    """
    material = "\x1f".join([str(seed), *map(str, path)]).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    mantissa = int.from_bytes(digest[:8], "big")
    return (mantissa + 0.5) / 2.0**64
