"""Splittable, order-independent random draws keyed on (seed, tag, key).

Every randomized choice in the pipeline is a pure function of a 64-bit
seed, a stage tag and the prime it belongs to, so results do not depend
on iteration order and are reproducible under parallel evaluation.
"""

import hashlib


def draw(seed: int, tag: str, key: int, modulus: int) -> int:
    """Uniform-ish integer in [0, modulus) determined by (seed, tag, key).

    The modulo bias is at most modulus / 2**64, far below anything the
    statistical checks in this package can resolve.
    """
    if modulus <= 0:
        raise ValueError("modulus must be positive")
    payload = f"{seed}:{tag}:{key}".encode()
    h = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(h, "big") % modulus
