"""Deterministic randomness and atomic file writes.

Everything downstream of a seed flows through the counter-based SHA-256
stream below, so outputs are reproducible across platforms and Python
versions (the stdlib Mersenne Twister makes no such promise for shuffle).
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile
from pathlib import Path
from typing import Iterator

MAX_SEED = (1 << 64) - 1


def hash_stream(seed: int) -> Iterator[int]:
    """Infinite stream of uniform 64-bit integers from SHA-256 in counter mode."""
    if not (0 <= seed <= MAX_SEED):
        raise ValueError("seed must fit in 64 unsigned bits")
    counter = 0
    while True:
        block = hashlib.sha256(struct.pack(">QQ", seed, counter)).digest()
        for off in (0, 8, 16, 24):
            yield int.from_bytes(block[off : off + 8], "big")
        counter += 1


def draw_below(stream: Iterator[int], n: int) -> int:
    """Exactly uniform draw from [0, n) via rejection sampling."""
    if n <= 0:
        raise ValueError("cannot draw from an empty range")
    limit = (1 << 64) - ((1 << 64) % n)
    while True:
        v = next(stream)
        if v < limit:
            return v % n


def shuffled(items, stream: Iterator[int]) -> list:
    """Fisher-Yates shuffle driven by the hash stream; input is not mutated."""
    arr = list(items)
    for i in range(len(arr) - 1, 0, -1):
        j = draw_below(stream, i + 1)
        arr[i], arr[j] = arr[j], arr[i]
    return arr


def atomic_write_bytes(path: str | Path, data: bytes) -> None:
    """Write a file so that it is either fully present or absent."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def atomic_write_text(path: str | Path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))
