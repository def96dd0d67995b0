"""Exact Shapley values, pairwise interactions, multi-order interactions,
and the output-decomposition identity.

Everything here enumerates coalitions, so it is the oracle for the Monte
Carlo estimators but limited to small player counts. Combinatorial
weights use exact integer factorials (fine up to the enumeration limit)
divided once at the end, so kernel normalization holds to ~1e-16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, OrderOutOfRange, TooManyPlayers
from .games import Game, submasks_of

ENUMERATION_LIMIT = 20
SUBSET_BUDGET = 1 << 22


def _check_enumerable(n: int, limit: int = ENUMERATION_LIMIT) -> None:
    if n > limit:
        raise TooManyPlayers(f"n={n} exceeds enumeration limit {limit}")


def shapley_kernel(n: int) -> np.ndarray:
    """Weight on each context size s for the pairwise interaction sum.

    Entry s is the probability weight of a single context S with |S| = s
    drawn from the n-2 players outside the pair; summed over all subsets
    the weights total 1.
    """
    if n < 2:
        raise ValueError("kernel needs n >= 2")
    fact = [math.factorial(k) for k in range(n)]
    denom = fact[n - 1]
    return np.array(
        [fact[s] * fact[n - 2 - s] / denom for s in range(n - 1)], dtype=np.float64
    )


def shapley_value(game: Game, i: int, limit: int = ENUMERATION_LIMIT) -> float:
    """Average marginal contribution of player i over all orderings."""
    return float(shapley_values(game, limit=limit)[i])


def shapley_values(game: Game, limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """All n Shapley values; satisfies sum = v(N) - v(empty)."""
    n = game.n
    _check_enumerable(n, limit)
    table = game.value_table()
    fact = [math.factorial(k) for k in range(n + 1)]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        others = [p for p in range(n) if p != i]
        masks, sizes = submasks_of(others)
        weights = np.array(
            [fact[s] * fact[n - 1 - s] / fact[n] for s in range(n)], dtype=np.float64
        )
        marginals = table[masks | (1 << i)] - table[masks]
        out[i] = float(np.dot(weights[sizes], marginals))
    return out


def _restricted_shapley(table: np.ndarray, active: list[int], i: int) -> float:
    """Shapley value of i in the subgame restricted to `active` players
    (absent players stay masked in every coalition)."""
    m = len(active)
    fact = [math.factorial(k) for k in range(m + 1)]
    others = [p for p in active if p != i]
    masks, sizes = submasks_of(others)
    weights = np.array(
        [fact[s] * fact[m - 1 - s] / fact[m] for s in range(m)], dtype=np.float64
    )
    marginals = table[masks | (1 << i)] - table[masks]
    return float(np.dot(weights[sizes], marginals))


def pairwise_interaction(game: Game, i: int, j: int,
                         limit: int = ENUMERATION_LIMIT) -> float:
    """Shapley interaction of the pair (i, j): the kernel-weighted sum of
    the second difference over every context excluding the pair."""
    n = game.n
    _check_enumerable(n, limit)
    if i == j:
        raise ValueError("i and j must be distinct")
    table = game.value_table()
    kernel = shapley_kernel(n)
    rest = [p for p in range(n) if p not in (i, j)]
    masks, sizes = submasks_of(rest)
    bi, bj = 1 << i, 1 << j
    deltas = table[masks | bi | bj] - table[masks | bi] - table[masks | bj] + table[masks]
    return float(np.dot(kernel[sizes], deltas))


def pairwise_interaction_fused(game: Game, i: int, j: int,
                               limit: int = ENUMERATION_LIMIT) -> float:
    """Same index via its alternative formulation: the Shapley value of
    the fused player {i,j} in the (n-1)-player game where the pair moves
    as one, minus the solo Shapley values of i without j and j without i.
    Agrees with `pairwise_interaction` to float precision; kept as a
    cross-check of the two formulations.
    """
    n = game.n
    _check_enumerable(n, limit)
    if i == j:
        raise ValueError("i and j must be distinct")
    table = game.value_table()
    rest = [p for p in range(n) if p not in (i, j)]
    m = n - 1  # fused player count
    fact = [math.factorial(k) for k in range(m + 1)]
    masks, sizes = submasks_of(rest)
    weights = np.array(
        [fact[s] * fact[m - 1 - s] / fact[m] for s in range(m)], dtype=np.float64
    )
    bi, bj = 1 << i, 1 << j
    phi_fused = float(np.dot(weights[sizes], table[masks | bi | bj] - table[masks]))
    phi_i = _restricted_shapley(table, [p for p in range(n) if p != j], i)
    phi_j = _restricted_shapley(table, [p for p in range(n) if p != i], j)
    return phi_fused - (phi_i + phi_j)


def _pair_deltas(table: np.ndarray, n: int, i: int, j: int):
    rest = [p for p in range(n) if p not in (i, j)]
    masks, sizes = submasks_of(rest)
    bi, bj = 1 << i, 1 << j
    deltas = table[masks | bi | bj] - table[masks | bi] - table[masks | bj] + table[masks]
    return deltas, sizes


def interaction_exact(game: Game, i: int, j: int, m: int,
                      budget: int = SUBSET_BUDGET,
                      limit: int = ENUMERATION_LIMIT) -> float:
    """Order-m interaction of (i, j): the exact mean of the second
    difference over every context of exactly m other players."""
    n = game.n
    _check_enumerable(n, limit)
    if i == j:
        raise ValueError("i and j must be distinct")
    if not 0 <= m <= n - 2:
        raise OrderOutOfRange(f"order m={m} outside [0, {n - 2}]")
    if math.comb(n - 2, m) > budget:
        raise BudgetExceeded(
            f"C({n - 2},{m}) = {math.comb(n - 2, m)} exceeds budget {budget}"
        )
    deltas, sizes = _pair_deltas(game.value_table(), n, i, j)
    sel = sizes == m
    return float(deltas[sel].mean())


def interaction_profile_exact(game: Game, i: int, j: int,
                              limit: int = ENUMERATION_LIMIT) -> np.ndarray:
    """Vector of exact order-m interactions of (i, j) for m = 0 .. n-2."""
    n = game.n
    _check_enumerable(n, limit)
    if i == j:
        raise ValueError("i and j must be distinct")
    deltas, sizes = _pair_deltas(game.value_table(), n, i, j)
    sums = np.bincount(sizes, weights=deltas, minlength=n - 1)
    counts = np.bincount(sizes, minlength=n - 1)
    return sums / counts


@dataclass(frozen=True)
class DecompositionReport:
    """Split of v(N) into baseline, solo effects, and per-order interaction
    aggregates; `residual` is the unexplained remainder and should sit at
    float-accumulation level for exact computation."""

    v_full: float
    v_empty: float
    mu: np.ndarray            # per-player solo effect v({i}) - v(empty)
    order_terms: np.ndarray   # per order m: w(m) * sum over ordered pairs of I_m(i,j)
    residual: float

    @property
    def explained(self) -> float:
        return self.v_empty + float(self.mu.sum()) + float(self.order_terms.sum())


def order_weights(n: int) -> np.ndarray:
    """Weights w(m) = (n-1-m) / (n (n-1)) applied to ordered-pair sums of
    order-m interactions in the output decomposition."""
    m = np.arange(n - 1, dtype=np.float64)
    return (n - 1 - m) / (n * (n - 1))


def decompose(game: Game, limit: int = ENUMERATION_LIMIT) -> DecompositionReport:
    """Exact output decomposition
    v(N) = v(empty) + sum_i mu_i + sum_m w(m) * sum_{ordered i != j} I_m(i,j).
    """
    n = game.n
    _check_enumerable(n, limit)
    table = game.value_table()
    v_empty = float(table[0])
    v_full = float(table[-1])
    mu = np.array([table[1 << i] - v_empty for i in range(n)])

    pair_sums = np.zeros(n - 1, dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            # ordered pairs: each unordered pair enters twice
            pair_sums += 2.0 * interaction_profile_exact(game, i, j, limit=limit)
    order_terms = order_weights(n) * pair_sums
    residual = v_full - (v_empty + float(mu.sum()) + float(order_terms.sum()))
    return DecompositionReport(v_full, v_empty, mu, order_terms, residual)
