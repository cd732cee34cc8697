"""Seed plumbing.

Every random stream used by the library is a pure function of a 64-bit master
seed and a tuple of non-negative integer keys::

    Generator(Philox(SeedSequence(master, spawn_key=key)))

Philox is counter based, so two streams with different keys never overlap and
the value drawn by replica ``i`` does not depend on which worker computed it or
in which order.  The first key element names the stream family (see the
constants below); the remaining elements are repetition / replica / block
counters chosen by the caller.
"""

from __future__ import annotations

import numpy as np

MEDIUM = 0
WALK = 1
REFERENCE = 2
AUX = 3

_SEED_MASK = (1 << 64) - 1


def substream(master: int, *key: int) -> np.random.Generator:
    """Return the generator for ``key`` under ``master``."""
    if master < 0 or master > _SEED_MASK:
        raise ValueError(f"master seed must fit in 64 unsigned bits, got {master}")
    if any(k < 0 for k in key):
        raise ValueError(f"stream keys must be non-negative, got {key}")
    seq = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def child_seed(rng: np.random.Generator) -> int:
    """Draw a fresh 63-bit master seed from ``rng``."""
    return int(rng.integers(0, 1 << 63))
