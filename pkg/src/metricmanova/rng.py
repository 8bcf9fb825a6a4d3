"""Deterministic random-stream derivation.

All randomness in this package flows from a single non-negative integer seed.
Independent streams are derived by extending the seed with a path of integer
identifiers, e.g. ``(seed, replicate)`` for simulation replicate data and
``(seed, replicate, tag)`` for the test run on that replicate.  The generator
is NumPy's PCG64 behind ``numpy.random.Generator``; two distinct paths yield
independent streams via ``SeedSequence`` hashing, so results never depend on
execution order or thread count.
"""

from __future__ import annotations

import numpy as np

# stream tags, kept distinct so derived paths cannot collide by accident
DATA_STREAM = 0
TEST_STREAM = 1
PERM_STREAM = 2


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return int(seed)


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """Generator for the stream identified by ``(seed, *path)``."""
    entropy = [check_seed(seed)] + [int(p) for p in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def spawn_seed(seed: int, *path: int) -> int:
    """A 128-bit integer seed derived deterministically from ``(seed, *path)``."""
    entropy = [check_seed(seed)] + [int(p) for p in path]
    state = np.random.SeedSequence(entropy).generate_state(4)
    return int.from_bytes(state.tobytes(), "little")


def permuted_labels(labels: np.ndarray, seed: int, replicate: int) -> np.ndarray:
    """The label vector for permutation replicate ``replicate``.

    Used by every permutation test so that identical ``(seed, replicate)``
    always means an identical shuffle.
    """
    rng = derive_rng(seed, PERM_STREAM, replicate)
    return labels[rng.permutation(labels.shape[0])]
