"""Counter-based random substreams.

Every stochastic object in the package draws from a Philox generator keyed
by (master seed, domain tag | index).  Streams are therefore bit-reproducible
and independent of execution order: realization 17 sees the same noise
whether it runs first, last, or in another process.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1

# Domain tags keep substream families disjoint (realizations vs. field
# calibration draws vs. limit-law ensembles, etc.).
DOMAIN_REALIZATION = 1
DOMAIN_FIELD = 2
DOMAIN_FBM = 3
DOMAIN_PHASE = 4
DOMAIN_CRITICAL = 5
DOMAIN_ORACLE = 6

_INDEX_BITS = 56


def substream(master_seed: int, domain: int, index: int = 0) -> np.random.Generator:
    """Generator for the (domain, index) substream of ``master_seed``."""
    if not 0 <= index < (1 << _INDEX_BITS):
        raise ValueError(f"substream index out of range: {index}")
    key = np.array(
        [master_seed & _MASK64, ((domain << _INDEX_BITS) | index) & _MASK64],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))
