"""Deterministic seed derivation.

All randomness in a run flows from one top-level seed. Subsystems never
share a generator; each derives a child seed as a stable 64-bit hash of
(seed, subsystem-name). The hash is blake2b, so child seeds are identical
across platforms, processes, and interpreter restarts.
"""

from __future__ import annotations

import hashlib


def stable_hash64(*parts: str | int | bytes) -> int:
    """64-bit hash of the parts, stable across platforms and runs."""
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        if isinstance(part, int):
            data = part.to_bytes(16, "little", signed=True)
        elif isinstance(part, str):
            data = part.encode("utf-8")
        else:
            data = part
        h.update(len(data).to_bytes(4, "little"))
        h.update(data)
    return int.from_bytes(h.digest(), "little")


def child_seed(seed: int, subsystem: str) -> int:
    """Derive the seed for a named subsystem from the top-level seed."""
    return stable_hash64(seed, subsystem)
