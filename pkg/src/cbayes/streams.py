"""Deterministic random streams.

Every stochastic routine in this package draws from a counter-based
generator (Philox) keyed by an integer seed plus a small integer path.
Distinct paths give statistically independent streams, and a stream's
output depends only on (seed, path), never on how many other streams
were opened.  All variates are produced from uniform doubles through
explicit transforms, so results are reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

# Path-domain tags.  Keeping the first path component distinct per use
# guarantees that, e.g., coefficient draws never collide with probe draws
# made under the same user seed.
COEFFS = 0
SCALES = 1
PROBES = 2
CHAIN = 3
DATA = 4


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for (seed, path); same arguments, same stream."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(p) for p in path))
    return np.random.Generator(np.random.Philox(ss))


def uniforms(gen: np.random.Generator, size) -> np.ndarray:
    """Uniform doubles in [0, 1) from an open stream."""
    return gen.random(size)
