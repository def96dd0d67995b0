"""Players, coalitions, game functions, and score caching.

A game assigns a scalar score v(S) to every coalition S of n players.
Coalitions are encoded little-endian: player 0 is the lowest bit of the
mask, so the canonical encoding of {0, 2} is 0b101 = 5. All scores are
64-bit floats; v(S) differences subtract near-equal quantities and
32-bit precision loses the signal.
"""

from __future__ import annotations

import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import IndexOutOfRange, PlayerInCoalition, ShapeMismatch


@dataclass(frozen=True)
class GameSpec:
    """Player universe: count, optional labels, optional distinguished pair."""

    n: int
    labels: tuple[str, ...] | None = None
    pair: tuple[int, int] | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"need at least 2 players, got n={self.n}")
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError("labels length must equal n")
        if self.pair is not None:
            i, j = self.pair
            if i == j:
                raise ValueError("distinguished pair must be two distinct players")
            for p in (i, j):
                if not 0 <= p < self.n:
                    raise IndexOutOfRange(f"pair player {p} outside [0, {self.n})")


@dataclass(frozen=True)
class Coalition:
    """Immutable subset of n players, packed as a little-endian bit mask."""

    n: int
    mask: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("coalition needs n >= 1")
        if self.mask < 0 or self.mask >> self.n:
            raise IndexOutOfRange(f"mask {self.mask:#x} does not fit {self.n} players")

    @classmethod
    def from_players(cls, n: int, players: Iterable[int]) -> "Coalition":
        mask = 0
        for p in players:
            if not 0 <= p < n:
                raise IndexOutOfRange(f"player {p} outside [0, {n})")
            mask |= 1 << p
        return cls(n, mask)

    @classmethod
    def from_bits(cls, bits: Sequence[bool]) -> "Coalition":
        mask = 0
        for p, b in enumerate(bits):
            if b:
                mask |= 1 << p
        return cls(len(bits), mask)

    @classmethod
    def empty(cls, n: int) -> "Coalition":
        return cls(n, 0)

    @classmethod
    def full(cls, n: int) -> "Coalition":
        return cls(n, (1 << n) - 1)

    def __contains__(self, player: int) -> bool:
        if not 0 <= player < self.n:
            raise IndexOutOfRange(f"player {player} outside [0, {self.n})")
        return bool(self.mask >> player & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.members())

    def members(self) -> tuple[int, ...]:
        return tuple(p for p in range(self.n) if self.mask >> p & 1)

    def bits(self) -> tuple[bool, ...]:
        return tuple(bool(self.mask >> p & 1) for p in range(self.n))

    def add(self, *players: int) -> "Coalition":
        return self.union(Coalition.from_players(self.n, players))

    def remove(self, *players: int) -> "Coalition":
        drop = Coalition.from_players(self.n, players)
        return Coalition(self.n, self.mask & ~drop.mask)

    def union(self, other: "Coalition") -> "Coalition":
        if other.n != self.n:
            raise ShapeMismatch(f"coalition sizes differ: {self.n} vs {other.n}")
        return Coalition(self.n, self.mask | other.mask)

    def complement(self) -> "Coalition":
        return Coalition(self.n, ~self.mask & ((1 << self.n) - 1))

    def mask_string(self) -> str:
        """'0'/'1' per player, player 0 first (the wire encoding)."""
        return "".join("1" if self.mask >> p & 1 else "0" for p in range(self.n))

    @classmethod
    def from_mask_string(cls, s: str) -> "Coalition":
        if set(s) - {"0", "1"}:
            raise ValueError(f"mask string must be 0/1 only, got {s!r}")
        mask = 0
        for p, ch in enumerate(s):
            if ch == "1":
                mask |= 1 << p
        return cls(len(s), mask)


def gray_order_masks(n: int) -> np.ndarray:
    """All 2^n coalition masks in Gray-code order (adjacent masks differ
    by one bit), as int64. Starts at the empty coalition."""
    k = np.arange(1 << n, dtype=np.int64)
    return k ^ (k >> 1)


def submasks_of(positions: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Enumerate every subset of the given bit positions.

    Returns (masks, sizes): int64 masks over the full player lattice and
    the cardinality of each subset. 2^len(positions) rows.
    """
    p = len(positions)
    idx = np.arange(1 << p, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(p)[None, :]) & 1
    weights = np.array([1 << q for q in positions], dtype=np.int64)
    masks = bits @ weights
    sizes = bits.sum(axis=1)
    return masks, sizes


class Game:
    """Evaluation contract: batches of coalitions to scalar scores.

    Implementations must be deterministic (same coalition, same score)
    and defined for all 2^n coalitions including the empty and full one.
    """

    def __init__(self, spec: GameSpec):
        self.spec = spec

    @property
    def n(self) -> int:
        return self.spec.n

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        """Score a batch of packed coalition masks (int64 array)."""
        raise NotImplementedError

    def evaluate(self, coalitions: Sequence[Coalition]) -> np.ndarray:
        for c in coalitions:
            if c.n != self.n:
                raise ShapeMismatch(f"coalition has {c.n} players, game has {self.n}")
        masks = np.array([c.mask for c in coalitions], dtype=np.int64)
        return self.evaluate_masks(masks)

    def value(self, coalition: Coalition) -> float:
        return float(self.evaluate([coalition])[0])

    def value_table(self) -> np.ndarray:
        """v over all 2^n masks, indexed by mask.

        Evaluates in Gray-code order so streaming scorers see coalitions
        that differ by a single player between consecutive calls.
        """
        masks = gray_order_masks(self.n)
        table = np.empty(1 << self.n, dtype=np.float64)
        table[masks] = self.evaluate_masks(masks)
        return table


class TabulatedGame(Game):
    """Game backed by an explicit table of 2^n scores indexed by mask."""

    def __init__(self, spec: GameSpec, values: np.ndarray):
        super().__init__(spec)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (1 << spec.n,):
            raise ShapeMismatch(
                f"need {1 << spec.n} values for n={spec.n}, got {values.shape}"
            )
        self.values = values

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, low=-1.0, high=1.0,
               pair: tuple[int, int] | None = None) -> "TabulatedGame":
        values = rng.uniform(low, high, size=1 << n)
        return cls(GameSpec(n=n, pair=pair), values)

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        return self.values[np.asarray(masks, dtype=np.int64)]

    def value_table(self) -> np.ndarray:
        return self.values.copy()


class AdditiveGame(Game):
    """v(S) = bias + sum of per-player weights over S. All interactions 0."""

    def __init__(self, weights: Sequence[float], bias: float = 0.0):
        weights = np.asarray(weights, dtype=np.float64)
        super().__init__(GameSpec(n=len(weights)))
        self.weights = weights
        self.bias = float(bias)

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        bits = (masks[:, None] >> np.arange(self.n)[None, :]) & 1
        return bits @ self.weights + self.bias


class PairAndGame(Game):
    """v(S) = scale if both distinguished players are in S, else 0."""

    def __init__(self, n: int, pair: tuple[int, int], scale: float = 1.0):
        super().__init__(GameSpec(n=n, pair=pair))
        self.scale = float(scale)
        i, j = pair
        self._both = (1 << i) | (1 << j)

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        hit = (masks & self._both) == self._both
        return np.where(hit, self.scale, 0.0)


class SumGame(Game):
    """Pointwise sum of two games over the same player set."""

    def __init__(self, left: Game, right: Game):
        if left.n != right.n:
            raise ShapeMismatch(f"player counts differ: {left.n} vs {right.n}")
        super().__init__(GameSpec(n=left.n, pair=left.spec.pair))
        self.left = left
        self.right = right

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        return self.left.evaluate_masks(masks) + self.right.evaluate_masks(masks)


@dataclass
class ValueCache:
    """Bounded LRU map from coalition mask to score.

    Safe for concurrent read/insert: a lock serializes access, so a
    cached score is always the score of its coalition; at worst two
    workers evaluate the same coalition once each.
    """

    capacity: int = 1 << 20
    _entries: OrderedDict = field(default_factory=OrderedDict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    hits: int = 0
    misses: int = 0

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, mask: int) -> float | None:
        with self._lock:
            if mask in self._entries:
                self._entries.move_to_end(mask)
                self.hits += 1
                return self._entries[mask]
            self.misses += 1
            return None

    def put(self, mask: int, score: float) -> None:
        with self._lock:
            self._entries[mask] = score
            self._entries.move_to_end(mask)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)


def evaluate_cached(game: Game, coalition: Coalition, cache: ValueCache) -> float:
    """v(S) through the cache: repeated queries do not re-evaluate."""
    if coalition.n != game.n:
        raise ShapeMismatch(f"coalition has {coalition.n} players, game has {game.n}")
    score = cache.get(coalition.mask)
    if score is None:
        score = game.value(coalition)
        cache.put(coalition.mask, score)
    return score


def delta_v(game: Game, i: int, j: int, context: Coalition,
            cache: ValueCache | None = None) -> float:
    """Second difference v(S∪{i,j}) − v(S∪{i}) − v(S∪{j}) + v(S).

    Exactly four evaluations, cache-mediated when a cache is given.
    Symmetric in i and j. Zero for additive games.
    """
    n = game.n
    for p in (i, j):
        if not 0 <= p < n:
            raise IndexOutOfRange(f"player {p} outside [0, {n})")
    if i == j:
        raise ValueError("i and j must be distinct")
    if i in context or j in context:
        raise PlayerInCoalition(f"context {context.members()} contains {i} or {j}")

    s_ij = context.add(i, j)
    s_i = context.add(i)
    s_j = context.add(j)
    if cache is not None:
        vals = [evaluate_cached(game, c, cache) for c in (s_ij, s_i, s_j, context)]
    else:
        vals = list(game.evaluate([s_ij, s_i, s_j, context]))
    return float(vals[0]) - float(vals[1]) - float(vals[2]) + float(vals[3])
