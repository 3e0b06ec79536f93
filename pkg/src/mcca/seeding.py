"""Deterministic random streams derived from a single seed.

Every random choice in the package flows from one user-facing seed through
``numpy.random.SeedSequence`` with an explicit integer path, so independent
stages (direction draws, per-component noise, k-means seeding) get
decorrelated streams that do not depend on execution order.  Serial and
parallel runs therefore see identical randomness.
"""

import numpy as np

# Stream ids, one per consumer.  Never renumber: archives and datasets
# written with one layout would stop being reproducible.
STREAM_SYNTH_DIRECTIONS = 0
STREAM_SYNTH_COMPONENT = 1
STREAM_KMEANS = 2


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Return a generator for the stream identified by ``(seed, *path)``."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def derive_seed(seed: int, *path: int) -> int:
    """Collapse a stream identity into a single integer seed."""
    return int(np.random.SeedSequence([int(seed), *map(int, path)]).generate_state(1)[0])
