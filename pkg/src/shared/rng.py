"""Seeded random streams shared by tomography runs and sweeps."""
from typing import Optional, Union

import numpy as np

DEFAULT_SEED = 20240601

SeedLike = Union[None, int, np.random.Generator]


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Return ``seed`` itself when it is already a Generator, else a fresh one seeded from it."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_rng(seed: int, *indices: int) -> np.random.Generator:
    """Independent stream for one work item, fixed by (seed, indices) alone.

    The number of indices is part of the entropy: SeedSequence pads short entropy
    lists with zeros, so (seed, i) and (seed, i, 0, 0) would otherwise collide.

    Args:
        seed: Campaign seed.
        *indices: Position of the work item (state index, grid index, ...).

    Returns:
        np.random.Generator: Stream that does not depend on execution order.
    """
    return np.random.default_rng([int(seed), len(indices)] + [int(i) for i in indices])


def fresh_seed(entropy: Optional[int] = None) -> int:
    """Draw a new 32-bit seed from OS entropy (used by ``--seed random``)."""
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])
