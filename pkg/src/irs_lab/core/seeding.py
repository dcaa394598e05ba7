import hashlib
from typing import Union

import numpy as np

SeedPart = Union[int, float, str, bytes]

_MASK63 = (1 << 63) - 1


def _to_bytes(part: SeedPart) -> bytes:
    if isinstance(part, bytes):
        return part
    if isinstance(part, bool):
        return b"1" if part else b"0"
    if isinstance(part, int):
        return part.to_bytes(16, "little", signed=True)
    if isinstance(part, float):
        # repr round-trips exactly, so 0.1 and 0.1000000001 never collide
        return repr(part).encode("utf-8")
    return str(part).encode("utf-8")


def derive_seed(master_seed: int, *parts: SeedPart) -> int:
    """Mix a master seed with labels into a stable 63-bit seed.

    Python's hash() is salted per process, so a keyed blake2b digest is used instead.
    The result is identical across processes, platforms and worker counts.
    """
    digest = hashlib.blake2b(_to_bytes(int(master_seed)), digest_size=8)
    for part in parts:
        digest.update(b"\x1f")
        digest.update(_to_bytes(part))
    return int.from_bytes(digest.digest(), "little") & _MASK63


def child_rng(master_seed: int, *parts: SeedPart) -> np.random.Generator:
    """A numpy Generator deterministically derived from master_seed and parts."""
    return np.random.default_rng(derive_seed(master_seed, *parts))
