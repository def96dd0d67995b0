"""Synthetic games built from explicit marginal-reward tables, and the
constructive checks that tie augmentation mechanisms to interaction
profiles.

A reward table assigns a marginal reward R(T) to every context coalition
T (not containing the distinguished pair) up to a configured order. The
generated game puts

    v(S) = sum of R(T) over T contained in S minus the pair,
           when both distinguished players are in S; else 0,

so the pair's second difference over context S is exactly the subset sum
of rewards, and the order-k interaction satisfies the closed form

    I_k = sum_{q <= k} C(k, q) * mean of R over contexts of size q.

Dropout-style augmentation keeps r of k context players, replacing the
top index by r in the closed form; the ratio of the two sums is the
compression factor and never exceeds 1 for nonnegative tables. Blending
two inputs adds their games pointwise, and interactions add exactly.
Detail-texture augmentation scales low-order rewards down, which shifts
relative strength away from the low band.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    IncompleteTable,
    InvalidPermutation,
    ShapeMismatch,
    ZeroDenominator,
)
from .exact import interaction_profile_exact
from .games import Game, GameSpec, SumGame, TabulatedGame, submasks_of
from .strength import StrengthProfile, normalize_strength


@dataclass(frozen=True)
class MixConfig:
    """Blend weight for combining two inputs: lam*x0 + (1-lam)*x1."""

    lam: float

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must be in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class CutoutConfig:
    """Dropout of context players: of k, a binomial(k, p) count r is kept."""

    k: int
    p: float
    r: int

    def __post_init__(self):
        if not 0 <= self.r <= self.k:
            raise ValueError(f"need 0 <= r <= k, got r={self.r}, k={self.k}")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"retention probability must be in (0, 1], got {self.p}")


@dataclass(frozen=True)
class RewardTable:
    """Marginal rewards R(T) for context coalitions of the distinguished
    pair, complete for all |T| <= max_order."""

    n: int
    pair: tuple[int, int]
    rewards: dict[tuple[int, ...], float]
    max_order: int

    def __post_init__(self):
        i, j = self.pair
        if i == j or not (0 <= i < self.n and 0 <= j < self.n):
            raise ValueError(f"bad pair {self.pair} for n={self.n}")
        if not 0 <= self.max_order <= self.n - 2:
            raise ValueError(f"max_order {self.max_order} outside [0, {self.n - 2}]")
        context = [p for p in range(self.n) if p not in self.pair]
        for key in self.rewards:
            if tuple(sorted(key)) != key:
                raise ValueError(f"reward key {key} must be sorted")
            if any(p not in context for p in key):
                raise ValueError(f"reward key {key} contains the pair or bad players")
        for q in range(self.max_order + 1):
            from itertools import combinations

            for t in combinations(context, q):
                if t not in self.rewards:
                    raise IncompleteTable(f"missing reward for context {t} (size {q})")

    def context_players(self) -> list[int]:
        return [p for p in range(self.n) if p not in self.pair]

    def size_means(self) -> np.ndarray:
        """Mean reward per context size q = 0..n-2 (0 beyond max_order)."""
        k = len(self.context_players())
        sums = np.zeros(k + 1)
        for t, r in self.rewards.items():
            sums[len(t)] += r
        counts = np.array([math.comb(k, q) for q in range(k + 1)], dtype=np.float64)
        return sums / counts

    @classmethod
    def uniform(cls, n: int, pair: tuple[int, int], value: float = 1.0,
                max_order: int | None = None) -> "RewardTable":
        from itertools import combinations

        if max_order is None:
            max_order = n - 2
        context = [p for p in range(n) if p not in pair]
        rewards = {
            t: value
            for q in range(max_order + 1)
            for t in combinations(context, q)
        }
        return cls(n=n, pair=pair, rewards=rewards, max_order=max_order)

    @classmethod
    def random(cls, n: int, pair: tuple[int, int], rng: np.random.Generator,
               low: float = 0.5, high: float = 1.5,
               max_order: int | None = None) -> "RewardTable":
        from itertools import combinations

        if max_order is None:
            max_order = n - 2
        context = [p for p in range(n) if p not in pair]
        rewards = {
            t: float(rng.uniform(low, high))
            for q in range(max_order + 1)
            for t in combinations(context, q)
        }
        return cls(n=n, pair=pair, rewards=rewards, max_order=max_order)


def reward_sum_interaction(table: RewardTable, k: int) -> float:
    """Closed-form order-k interaction of the distinguished pair:
    sum over q <= k of C(k, q) times the size-q mean reward."""
    if not 0 <= k <= table.n - 2:
        raise ValueError(f"order k={k} outside [0, {table.n - 2}]")
    means = table.size_means()
    return float(sum(math.comb(k, q) * means[q] for q in range(k + 1)))


def game_from_rewards(table: RewardTable) -> TabulatedGame:
    """Materialize the game generated by a reward table.

    The distinguished pair's exact order-k interaction then matches
    `reward_sum_interaction` for every k.
    """
    n = table.n
    i, j = table.pair
    context = table.context_players()
    k = len(context)

    # subset-sum (zeta) transform of rewards over the context lattice
    pos = {p: idx for idx, p in enumerate(context)}
    zeta = np.zeros(1 << k, dtype=np.float64)
    for t, r in table.rewards.items():
        idx = 0
        for p in t:
            idx |= 1 << pos[p]
        zeta[idx] = r
    for b in range(k):
        bit = 1 << b
        idx = np.arange(1 << k)
        has = (idx & bit).astype(bool)
        zeta[has] += zeta[idx[has] ^ bit]

    table_vals = np.zeros(1 << n, dtype=np.float64)
    ctx_masks, _ = submasks_of(context)
    # submasks_of enumerates by compressed index, aligned with zeta's indexing
    table_vals[ctx_masks | (1 << i) | (1 << j)] = zeta
    return TabulatedGame(GameSpec(n=n, pair=table.pair), table_vals)


def cutout_ratio(table: RewardTable, k: int, r: int) -> float:
    """Interaction compression when only r of k context players survive:
    ratio of the r-truncated reward sum to the full order-k sum."""
    if not 0 <= r <= k:
        raise ValueError(f"need 0 <= r <= k, got r={r}, k={k}")
    denom = reward_sum_interaction(table, k)
    if denom == 0.0:
        raise ZeroDenominator(f"order-{k} interaction is zero")
    means = table.size_means()
    numer = float(sum(math.comb(r, q) * means[q] for q in range(r + 1)))
    return numer / denom


def mix_games(u: Game, v: Game) -> SumGame:
    """Combine two independent games pointwise; every order's interaction
    adds exactly."""
    if u.n != v.n:
        raise ShapeMismatch(f"player counts differ: {u.n} vs {v.n}")
    return SumGame(u, v)


def suppress_low_order(table: RewardTable, q_star: int, factor: float) -> RewardTable:
    """Scale rewards of contexts with |T| <= q_star by `factor` (< 1),
    leaving larger contexts untouched. Applying factor f twice equals
    applying f^2 once."""
    if not 0.0 <= factor < 1.0:
        raise ValueError(f"factor must be in [0, 1), got {factor}")
    if q_star < 0:
        raise ValueError("q_star must be >= 0")
    rewards = {
        t: (r * factor if len(t) <= q_star else r)
        for t, r in table.rewards.items()
    }
    return RewardTable(n=table.n, pair=table.pair, rewards=rewards,
                       max_order=table.max_order)


def permute_table(table: RewardTable, permutation: dict[int, int]) -> RewardTable:
    """Relabel context players in every reward key. The permutation must
    cover all n players, be a bijection, and fix the distinguished pair."""
    if sorted(permutation) != list(range(table.n)) or sorted(
            permutation.values()) != list(range(table.n)):
        raise InvalidPermutation(f"not a permutation of 0..{table.n - 1}")
    for p in table.pair:
        if permutation[p] != p:
            raise InvalidPermutation(f"permutation moves pinned player {p}")
    rewards = {
        tuple(sorted(permutation[p] for p in t)): r
        for t, r in table.rewards.items()
    }
    return RewardTable(n=table.n, pair=table.pair, rewards=rewards,
                       max_order=table.max_order)


def reward_shift_invariance_check(table: RewardTable,
                                  permutation: dict[int, int],
                                  tol: float = 1e-12) -> bool:
    """True iff relabeling context players leaves every order's exact
    interaction of the pair unchanged (it always should: the interaction
    sees rewards only through their per-size means)."""
    before = interaction_profile_exact(game_from_rewards(table), *table.pair)
    permuted = permute_table(table, permutation)
    after = interaction_profile_exact(game_from_rewards(permuted), *table.pair)
    scale = np.maximum(1.0, np.abs(before))
    return bool(np.all(np.abs(before - after) <= tol * scale))


def strength_profile_from_table(table: RewardTable, orders=None,
                                model_id: str = "table") -> StrengthProfile:
    """Exact strength profile of the distinguished pair over the given
    integer orders (default 0..floor(n/2): the low-through-mid range the
    augmentation comparisons are about)."""
    if orders is None:
        orders = list(range(table.n // 2 + 1))
    profile = interaction_profile_exact(game_from_rewards(table), *table.pair)
    raw = np.abs(profile[list(orders)])
    return normalize_strength(raw, n=table.n, orders=list(orders), model_id=model_id)


@dataclass(frozen=True)
class SuppressionShift:
    """Band masses of the strength profile before and after low-order
    suppression."""

    low_before: float
    low_after: float
    mid_before: float
    mid_after: float

    @property
    def low_dropped(self) -> bool:
        return self.low_after < self.low_before

    @property
    def mid_raised(self) -> bool:
        return self.mid_after > self.mid_before


def suppression_shift_report(table: RewardTable, q_star: int, factor: float,
                             orders=None) -> SuppressionShift:
    """Compare strength-profile band masses before/after suppressing
    low-order rewards.

    Low band: orders <= q_star. Mid band: orders strictly inside
    (0.3 n, 0.5 n). Profiles are normalized over `orders` (default
    0..floor(n/2)); a grid reaching far past the mid band would hand the
    relative gains to the top orders instead, because interactions of
    nonnegative tables grow with order.
    """
    n = table.n
    if orders is None:
        orders = list(range(n // 2 + 1))
    before = strength_profile_from_table(table, orders)
    after = strength_profile_from_table(
        suppress_low_order(table, q_star, factor), orders
    )
    j_before = dict(zip(orders, before.J))
    j_after = dict(zip(orders, after.J))
    low = [m for m in orders if m <= q_star]
    mid = [m for m in orders if 0.3 * n < m < 0.5 * n]
    if not low or not mid:
        raise ValueError(f"bands empty for n={n}, q_star={q_star}, orders={orders}")
    return SuppressionShift(
        low_before=sum(j_before[m] for m in low),
        low_after=sum(j_after[m] for m in low),
        mid_before=sum(j_before[m] for m in mid),
        mid_after=sum(j_after[m] for m in mid),
    )
