"""
Seeded random streams.

Every run draws from one PCG64 generator. Sweep replications derive their seed
from the master seed and the grid position:

    seed' = seed XOR blake2b-64("<V index>:<delta index>:<replication index>")

so a row's stream depends only on where it sits in the grid, never on which
worker ran it or in what order.
"""

import hashlib

import numpy as np

from renewal_opt.config.config import SEED_LIMIT
from renewal_opt.exceptions import ValidationError


def derive_seed(seed: int, v_index: int, delta_index: int, rep_index: int) -> int:
    if not 0 <= seed < SEED_LIMIT:
        raise ValidationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    digest = hashlib.blake2b(f"{v_index}:{delta_index}:{rep_index}".encode(), digest_size=8).digest()
    return seed ^ int.from_bytes(digest, "little")


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))
