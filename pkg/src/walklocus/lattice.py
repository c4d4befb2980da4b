"""Lattice points, step sequences, and nearest-neighbour walks on Z^d.

Coordinates are 64-bit signed integers throughout. Walks are stored as compact
step arrays (axis index plus sign) and positions are materialized on demand as
an (n+1, d) int64 array. Randomness comes from named Philox streams so that a
replicate's walk is a pure function of (seed, replicate index), independent of
scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError

LatticePoint = Tuple[int, ...]

# Stream derivation scheme, recorded in reports. Bump the suffix if the
# derivation below ever changes.
STREAM_SCHEME = "philox4x64/seedseq/v1"

# Refuse to materialize positions larger than this (bytes). Keeps a runaway
# n from OOMing the host before numpy even gets going.
MAX_POSITION_BYTES = 2 << 30

_COORD_LIMIT = np.iinfo(np.int64).max - 1


def rng_stream(seed: int, *path: int) -> np.random.Generator:
    """Return the named Philox stream for (seed, *path).

    Streams for distinct paths are statistically independent and their
    derivation is order-free: stream(seed, 7) is the same generator whether or
    not stream(seed, 3) was ever created.
    """
    if seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(path))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class StepSequence:
    """Signed unit steps: step t moves by signs[t] along coordinate axes[t]."""

    dimension: int
    axes: np.ndarray
    signs: np.ndarray

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ConfigError("dimension must be >= 1")
        if self.axes.shape != self.signs.shape or self.axes.ndim != 1:
            raise ConfigError("axes and signs must be equal-length 1-d arrays")
        if self.axes.size and (self.axes.min() < 0 or self.axes.max() >= self.dimension):
            raise ConfigError("step axis out of range")
        if self.signs.size and not np.all(np.abs(self.signs) == 1):
            raise ConfigError("step signs must be +1 or -1")

    def __len__(self) -> int:
        return int(self.axes.size)

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        for a, s in zip(self.axes.tolist(), self.signs.tolist()):
            yield (a, s)

    @classmethod
    def from_pairs(cls, dimension: int, pairs: Sequence[Tuple[int, int]]) -> "StepSequence":
        axes = np.asarray([p[0] for p in pairs], dtype=np.int64)
        signs = np.asarray([p[1] for p in pairs], dtype=np.int8)
        return cls(dimension, axes, signs)

    def displacements(self) -> np.ndarray:
        """(n, d) int64 array of per-step displacement vectors."""
        n = len(self)
        out = np.zeros((n, self.dimension), dtype=np.int64)
        if n:
            out[np.arange(n), self.axes] = self.signs
        return out


@dataclass(frozen=True)
class Walk:
    """A nearest-neighbour path on Z^d: a start point plus its steps."""

    start: LatticePoint
    steps: StepSequence
    _positions: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.start) != self.steps.dimension:
            raise ConfigError("start point dimension does not match steps")

    @property
    def dimension(self) -> int:
        return self.steps.dimension

    @property
    def n(self) -> int:
        return len(self.steps)

    def positions(self) -> np.ndarray:
        """(n+1, d) int64 positions; row t is the location after t steps."""
        cached = object.__getattribute__(self, "_positions")
        if cached is not None:
            return cached
        n, d = self.n, self.dimension
        nbytes = (n + 1) * d * 8
        if nbytes > MAX_POSITION_BYTES:
            raise ConfigError(
                f"walk of {n} steps in dimension {d} exceeds the position "
                f"buffer budget ({nbytes} > {MAX_POSITION_BYTES} bytes)"
            )
        pos = np.empty((n + 1, d), dtype=np.int64)
        pos[0] = self.start
        if n:
            np.cumsum(self.steps.displacements(), axis=0, out=pos[1:])
            pos[1:] += pos[0]
        if n and (int(pos.max()) > _COORD_LIMIT or int(pos.min()) < -_COORD_LIMIT):
            raise OverflowError("walk coordinates exceed the 64-bit range")
        object.__setattr__(self, "_positions", pos)
        return pos

    def position(self, t: int) -> LatticePoint:
        if not 0 <= t <= self.n:
            raise IndexError(f"time {t} outside [0, {self.n}]")
        return tuple(int(x) for x in self.positions()[t])


def origin(dimension: int) -> LatticePoint:
    if dimension < 1:
        raise ConfigError("dimension must be >= 1")
    return (0,) * dimension


def neighbors(point: LatticePoint) -> list[LatticePoint]:
    """The 2d lattice neighbours of point, axis-major, minus direction first."""
    out: list[LatticePoint] = []
    for axis in range(len(point)):
        for sign in (-1, 1):
            c = point[axis] + sign
            if abs(c) > _COORD_LIMIT:
                raise OverflowError("neighbour coordinate exceeds the 64-bit range")
            out.append(point[:axis] + (c,) + point[axis + 1 :])
    return out


def random_steps(dimension: int, n: int, rng: np.random.Generator) -> StepSequence:
    """Draw n uniform signed unit steps from an existing stream."""
    if dimension < 1:
        raise ConfigError("dimension must be >= 1")
    if n < 0:
        raise ConfigError("step count must be >= 0")
    codes = rng.integers(0, 2 * dimension, size=n, dtype=np.int64)
    return StepSequence(dimension, codes >> 1, (2 * (codes & 1) - 1).astype(np.int8))


def generate_walk(
    dimension: int,
    n: int,
    seed: int,
    start: Optional[LatticePoint] = None,
    stream_path: Tuple[int, ...] = (),
) -> Walk:
    """Simple random walk of n steps; bit-identical for identical inputs."""
    rng = rng_stream(seed, *stream_path)
    steps = random_steps(dimension, n, rng)
    return Walk(start if start is not None else origin(dimension), steps)
