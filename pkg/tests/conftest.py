"""Shared fixtures and independently coded oracles.

The oracles enumerate with itertools over frozensets and a dict-backed
value function, deliberately avoiding the library's packed-mask
arithmetic, so agreement between the two is a real cross-check.
"""

import itertools
import math

import numpy as np
import pytest

from gameint.games import TabulatedGame


def game_as_dict(game: TabulatedGame) -> dict[frozenset, float]:
    n = game.n
    table = game.value_table()
    out = {}
    for mask in range(1 << n):
        members = frozenset(p for p in range(n) if mask >> p & 1)
        out[members] = float(table[mask])
    return out


def oracle_delta(values: dict, i: int, j: int, context: frozenset) -> float:
    return (
        values[context | {i, j}]
        - values[context | {i}]
        - values[context | {j}]
        + values[context]
    )


def oracle_interaction(values: dict, n: int, i: int, j: int, m: int) -> float:
    others = [p for p in range(n) if p not in (i, j)]
    terms = [
        oracle_delta(values, i, j, frozenset(combo))
        for combo in itertools.combinations(others, m)
    ]
    return sum(terms) / len(terms)


def oracle_shapley_by_permutations(values: dict, n: int, i: int) -> float:
    total = 0.0
    for perm in itertools.permutations(range(n)):
        before = set()
        for p in perm:
            if p == i:
                break
            before.add(p)
        total += values[frozenset(before | {i})] - values[frozenset(before)]
    return total / math.factorial(n)


def oracle_restricted_shapley(values: dict, active: list[int], i: int) -> float:
    """Shapley value of i within the subgame on `active` (others masked)."""
    m = len(active)
    others = [p for p in active if p != i]
    total = 0.0
    for size in range(m):
        weight = math.factorial(size) * math.factorial(m - 1 - size) / math.factorial(m)
        for combo in itertools.combinations(others, size):
            s = frozenset(combo)
            total += weight * (values[s | {i}] - values[s])
    return total


def oracle_pairwise_fused(values: dict, n: int, i: int, j: int) -> float:
    """Pairwise interaction via the fused-pair formulation, dict-based."""
    rest = [p for p in range(n) if p not in (i, j)]
    m = n - 1
    fused = 0.0
    for size in range(m):
        weight = math.factorial(size) * math.factorial(m - 1 - size) / math.factorial(m)
        for combo in itertools.combinations(rest, size):
            s = frozenset(combo)
            fused += weight * (values[s | {i, j}] - values[s])
    solo_i = oracle_restricted_shapley(values, [p for p in range(n) if p != j], i)
    solo_j = oracle_restricted_shapley(values, [p for p in range(n) if p != i], j)
    return fused - (solo_i + solo_j)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
