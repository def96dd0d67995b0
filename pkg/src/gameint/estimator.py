"""Monte Carlo estimation of order-m interactions and order-wise mean
absolute interaction strength.

Reproducibility contract: every sampled quantity draws from its own
counter-based stream (Philox keyed by a hash of seed, input id, pair,
and order), so results are bit-identical for a given SampleConfig no
matter how the work is scheduled or how many workers run it. Reductions
happen along fixed array axes.
"""

from __future__ import annotations

import hashlib
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInputSet, OrderOutOfRange, ShapeMismatch
from .exact import interaction_exact
from .games import Game, submasks_of

DEFAULT_ORDER_GRID = tuple(round(0.05 * k, 2) for k in range(20))  # 0, 0.05, ..., 0.95

WORKERS_ENV_VAR = "GAMEINT_WORKERS"


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV_VAR, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SampleConfig:
    """Sampling plan: seed, per-order subset draws, pairs per input, and
    the normalized order grid (fractions of n, floored to integers)."""

    seed: int = 0
    subsets_per_order: int = 200
    pairs_per_input: int = 20
    order_grid: tuple[float, ...] = DEFAULT_ORDER_GRID
    exhaustive_switch: bool = True

    def __post_init__(self):
        if self.subsets_per_order < 1:
            raise ValueError("subsets_per_order must be >= 1")
        if self.pairs_per_input < 1:
            raise ValueError("pairs_per_input must be >= 1")
        for x in self.order_grid:
            if not 0.0 <= x <= 1.0:
                raise ValueError(f"order grid value {x} outside [0, 1]")

    def orders_for(self, n: int) -> list[int]:
        """Integer orders: floor(x*n), out-of-range values dropped,
        duplicates merged, ascending."""
        orders = sorted({math.floor(x * n + 1e-9) for x in self.order_grid})
        orders = [m for m in orders if 0 <= m <= n - 2]
        if not orders:
            raise OrderOutOfRange(
                f"order grid {self.order_grid} yields no valid order for n={n}"
            )
        return orders


@dataclass(frozen=True)
class InteractionEstimate:
    """Sampled order-m interaction for one pair, with its standard error."""

    i: int
    j: int
    m: int
    mean: float
    std_error: float
    n_samples: int
    exhaustive: bool = False


@dataclass(frozen=True)
class InputSet:
    """Named collection of games sharing one player count (one game per
    input instance)."""

    items: tuple[tuple[str, Game], ...]

    def __post_init__(self):
        if not self.items:
            raise EmptyInputSet("input set is empty")
        ids = [name for name, _ in self.items]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate input ids in {ids}")
        ns = {g.n for _, g in self.items}
        if len(ns) > 1:
            raise ShapeMismatch(f"inputs disagree on player count: {sorted(ns)}")

    @property
    def n(self) -> int:
        return self.items[0][1].n

    def __len__(self) -> int:
        return len(self.items)


def _stream(seed: int, input_id: str, *fields) -> np.random.Generator:
    """Independent Philox stream keyed by (seed, input id, fields)."""
    tag = "|".join([str(seed), input_id, *map(str, fields)]).encode()
    key = int.from_bytes(hashlib.blake2b(tag, digest_size=16).digest(), "little")
    return np.random.Generator(np.random.Philox(key=key))


def _floyd_sample(gen: np.random.Generator, pool: list[int], m: int) -> int:
    """Uniform size-m subset of pool as a packed mask (Floyd's method:
    O(m) draws, exactly uniform)."""
    k = len(pool)
    chosen: set[int] = set()
    for t in range(k - m, k):
        idx = int(gen.integers(0, t + 1))
        cand = pool[idx]
        if cand in chosen:
            cand = pool[t]
        chosen.add(cand)
    mask = 0
    for p in chosen:
        mask |= 1 << p
    return mask


def estimate_interaction(game: Game, i: int, j: int, m: int, cfg: SampleConfig,
                         input_id: str = "") -> InteractionEstimate:
    """Unbiased sample mean of the second difference over uniformly drawn
    size-m contexts. Falls back to full enumeration when the context
    count does not exceed the sample budget (strictly better estimate at
    equal cost); the enumerated estimate has zero standard error.
    """
    n = game.n
    if i == j:
        raise ValueError("i and j must be distinct")
    if not 0 <= m <= n - 2:
        raise OrderOutOfRange(f"order m={m} outside [0, {n - 2}]")

    total = math.comb(n - 2, m)
    if cfg.exhaustive_switch and total <= cfg.subsets_per_order:
        exact = interaction_exact(game, i, j, m)
        return InteractionEstimate(i, j, m, exact, 0.0, total, exhaustive=True)

    gen = _stream(cfg.seed, input_id, i, j, m)
    pool = [p for p in range(n) if p not in (i, j)]
    k = cfg.subsets_per_order
    masks = np.fromiter(
        (_floyd_sample(gen, pool, m) for _ in range(k)), dtype=np.int64, count=k
    )
    bi, bj = 1 << i, 1 << j
    stacked = np.concatenate([masks | bi | bj, masks | bi, masks | bj, masks])
    vals = game.evaluate_masks(stacked).reshape(4, k)
    deltas = vals[0] - vals[1] - vals[2] + vals[3]
    mean = float(deltas.mean())
    if k > 1:
        std_error = float(deltas.std(ddof=1) / math.sqrt(k))
    else:
        std_error = 0.0
    return InteractionEstimate(i, j, m, mean, std_error, k)


def _sample_pairs(n: int, cfg: SampleConfig, input_id: str) -> list[tuple[int, int]]:
    """Pairs for one input: all unordered pairs in lexicographic order when
    the budget covers them, otherwise a uniform draw without replacement."""
    all_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if cfg.pairs_per_input >= len(all_pairs):
        return all_pairs
    gen = _stream(cfg.seed, input_id, "pairs")
    idx = gen.choice(len(all_pairs), size=cfg.pairs_per_input, replace=False)
    return [all_pairs[int(t)] for t in sorted(idx)]


def raw_order_strength(inputs: InputSet, cfg: SampleConfig,
                       workers: int | None = None) -> tuple[list[int], np.ndarray]:
    """Per-order mean of |estimated interaction| over inputs and sampled
    pairs. Returns (integer orders, raw strength vector).

    The (input, pair, order) cells are independent; each owns its RNG
    stream, and cell results land in a fixed-shape array reduced along
    fixed axes, so the result is identical for any worker count.
    """
    n = inputs.n
    orders = cfg.orders_for(n)
    if workers is None:
        workers = worker_count()

    cells = []
    pair_counts = []
    for name, game in inputs.items:
        pairs = _sample_pairs(n, cfg, name)
        pair_counts.append(len(pairs))
        for p_idx, (i, j) in enumerate(pairs):
            for o_idx, m in enumerate(orders):
                cells.append((name, game, i, j, m, len(pair_counts) - 1, p_idx, o_idx))

    out = np.zeros((len(inputs), max(pair_counts), len(orders)), dtype=np.float64)

    def run(cell):
        name, game, i, j, m, x_idx, p_idx, o_idx = cell
        est = estimate_interaction(game, i, j, m, cfg, input_id=name)
        out[x_idx, p_idx, o_idx] = abs(est.mean)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, cells))
    else:
        for cell in cells:
            run(cell)

    # mean over pairs within each input (inputs may sample different pair
    # counts only if n differs, which InputSet forbids; still divide per row)
    per_input = out.sum(axis=1) / np.array(pair_counts, dtype=np.float64)[:, None]
    return orders, per_input.mean(axis=0)
