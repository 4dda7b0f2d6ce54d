"""Splittable counter-based random streams.

Every random draw in the package comes from a Philox generator keyed by
``(seed, *key)``, so results never depend on the order in which nodes or
trials are executed.
"""
from __future__ import annotations

import numpy as np

# Stream purposes; part of the key so different uses never collide.
GRAPH = 1
COLOR = 2
PRIORITY = 3
HEAVY = 4
SELF_CHECK = 5
THINNING = 6
GIRTH = 7
REDUCTION = 8
WORKLOAD = 9


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``seed`` and an integer key path."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))
