"""Counter-based random substreams.

Every stochastic quantity in the simulator is drawn from a substream derived
from the single master seed plus an integer/string path naming the consumer
(e.g. ``substream(seed, "dataset", class_index, example_index)``).  Substreams
are mutually independent and do not depend on the order in which they are
created, so results are identical for any worker count or scheduling order.

Streams are backed by the Philox counter-based bit generator keyed through
``numpy.random.SeedSequence``, which is stable across platforms and numpy
versions.
"""

from __future__ import annotations

import zlib

import numpy as np

__all__ = ["seed_for", "substream", "child_seed"]


def _path_ints(path) -> tuple[int, ...]:
    out = []
    for p in path:
        if isinstance(p, str):
            out.append(zlib.crc32(p.encode("utf-8")))
        elif isinstance(p, (int, np.integer)):
            out.append(int(p) & 0xFFFFFFFFFFFFFFFF)
        else:
            raise TypeError(f"substream path elements must be int or str, got {type(p)!r}")
    return tuple(out)


def seed_for(seed: int, *path) -> np.random.SeedSequence:
    """Derive the SeedSequence for a named substream of the master seed."""
    if not 0 <= int(seed) < 2**64:
        raise ValueError("master seed must be an unsigned 64-bit integer")
    return np.random.SeedSequence(entropy=int(seed), spawn_key=_path_ints(path))


def substream(seed: int, *path) -> np.random.Generator:
    """Independent Generator for the (seed, *path) substream."""
    return np.random.Generator(np.random.Philox(seed_for(seed, *path)))


def child_seed(seed: int, *path) -> int:
    """Derive a 63-bit master seed for a nested substream family."""
    return int(substream(seed, *path).integers(0, 2**63))
