"""Deterministic random streams.

Every stochastic component in the suite draws from an RngStream instead of
global state. A stream is fully identified by two integers (seed, stream_id)
and is backed by the counter-based Philox4x64-10 bit generator, so the same
pair replays the same draw sequence on any platform. Child streams are derived
by hashing (seed, stream_id, child_id), which makes stream assignment
independent of execution order — parallel and serial runs see identical draws.
"""
from __future__ import annotations

import hashlib
import struct

import numpy as np

_MASK64 = (1 << 64) - 1


class RngStream:
    """A named, replayable source of randomness."""

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._generator: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        if self._generator is None:
            key = np.array(
                [self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64
            )
            self._generator = np.random.Generator(np.random.Philox(key=key))
        return self._generator

    def split(self, child_id: int) -> "RngStream":
        """Deterministic child stream; children of distinct ids are independent."""
        raw = struct.pack(
            "<QQQ",
            self.seed & _MASK64,
            self.stream_id & _MASK64,
            int(child_id) & _MASK64,
        )
        digest = hashlib.sha256(raw).digest()
        return RngStream(self.seed, int.from_bytes(digest[:8], "little"))

    def split_label(self, label: str) -> "RngStream":
        """split() keyed by a string, for order-independent named sub-streams."""
        child = int.from_bytes(
            hashlib.sha256(label.encode("utf-8")).digest()[:8], "little"
        )
        return self.split(child)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


def split_stream(rng: RngStream, child_id: int) -> RngStream:
    return rng.split(child_id)
