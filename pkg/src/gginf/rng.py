"""Seeded uniform(0, 1) streams.

Each stream is a Philox-4x64 counter generator keyed by the pair
``(seed, salt)``. The n-th uniform of a stream depends only on
``(seed, salt, n)``, and the bit stream is identical on every platform
numpy supports.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from .errors import ConfigError

# 52 random bits mapped to the midpoint grid (k + 0.5) / 2**52, which lies
# strictly inside (0, 1) for every k and is exactly representable.
_SHIFT = np.uint64(12)
_SCALE = 2.0 ** -52
_LOWEST = np.nextafter(0.0, 1.0)
_HIGHEST = np.nextafter(1.0, 0.0)
_SKIP_CHUNK = 1 << 20


def _bits_to_unit(raw: np.ndarray) -> np.ndarray:
    u = ((raw >> _SHIFT).astype(np.float64) + 0.5) * _SCALE
    # unreachable with the midpoint grid; kept so ln(u) can never see 0 or 1
    return np.clip(u, _LOWEST, _HIGHEST)


class UniformStream:
    """Sequential uniform(0, 1) draws with a replayable cursor."""

    def __init__(self, seed: int, salt: int = 0):
        self.seed = int(seed)
        self.salt = int(salt)
        self.cursor = 0
        self._bitgen = self._fresh()

    def _fresh(self) -> np.random.Philox:
        key = np.array([self.seed, self.salt], dtype=np.uint64)
        return np.random.Philox(key=key)

    def next_uniform(self) -> float:
        self.cursor += 1
        return float(_bits_to_unit(self._bitgen.random_raw(1))[0])

    def uniforms(self, n: int) -> np.ndarray:
        """Return the next ``n`` draws as a float64 array."""
        if n < 0:
            raise ValueError(f"cannot draw {n} uniforms")
        self.cursor += n
        return _bits_to_unit(self._bitgen.random_raw(n))

    def reset(self) -> None:
        self.seek(0)

    def seek(self, cursor: int) -> None:
        """Reposition so the next draw is the one with index ``cursor``."""
        if cursor < 0:
            raise ValueError("cursor must be non-negative")
        self._bitgen = self._fresh()
        remaining = cursor
        while remaining:
            step = min(remaining, _SKIP_CHUNK)
            self._bitgen.random_raw(step)
            remaining -= step
        self.cursor = cursor

    def __repr__(self) -> str:
        return f"UniformStream(seed={self.seed}, salt={self.salt}, cursor={self.cursor})"


def create_stream(seed: int, salt: int = 0) -> UniformStream:
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    if seed <= 0:
        raise ConfigError(f"seed must be positive, got {seed}")
    if salt < 0:
        raise ConfigError(f"salt must be non-negative, got {salt}")
    if seed >= 1 << 64 or salt >= 1 << 64:
        raise ConfigError("seed and salt must fit in 64 bits")
    return UniformStream(int(seed), int(salt))


def next_uniform(stream: UniformStream) -> float:
    return stream.next_uniform()


class Role(IntEnum):
    """Stream roles. E/F feed inter-arrival times, G/H feed service times."""

    E = 0
    F = 1
    G = 2
    H = 3


@dataclass(frozen=True)
class SeedPlan:
    e_seed: int
    g_seed: int
    f_seed: Optional[int] = None
    h_seed: Optional[int] = None
    master_salt: int = 0

    def __post_init__(self):
        for name in ("e_seed", "f_seed", "g_seed", "h_seed"):
            value = getattr(self, name)
            if value is None and name in ("f_seed", "h_seed"):
                continue
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value <= 0:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.master_salt < 0 or self.master_salt >= 1 << 32:
            raise ConfigError("master_salt must be in [0, 2**32)")

    def salt(self, replication: int, column: int) -> int:
        # master salt in the high word, replication and column below it,
        # so every (replication, column) pair gets its own key
        if not 0 <= replication < 1 << 24 or not 0 <= column < 1 << 8:
            raise ConfigError("replication or column index out of range")
        return (self.master_salt << 32) | (replication << 8) | column

    def stream(self, role: Role, replication: int = 0, column: Optional[int] = None) -> UniformStream:
        """Stream for ``role``; a missing F/H seed falls back to E/G with a distinct salt."""
        seed = {
            Role.E: self.e_seed,
            Role.F: self.f_seed if self.f_seed is not None else self.e_seed,
            Role.G: self.g_seed,
            Role.H: self.h_seed if self.h_seed is not None else self.g_seed,
        }[role]
        col = int(role) if column is None else column
        return create_stream(seed, self.salt(replication, col))

    def to_dict(self) -> dict:
        return {
            "e_seed": self.e_seed,
            "f_seed": self.f_seed,
            "g_seed": self.g_seed,
            "h_seed": self.h_seed,
            "master_salt": self.master_salt,
        }
