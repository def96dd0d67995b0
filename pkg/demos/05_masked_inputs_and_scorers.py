"""From raw inputs to games: region partitions, baseline masking, and
in-process scorers.

An image becomes a game by tiling it into patches (the players); a
coalition keeps its members' pixels and writes baseline values over the
rest, and the scorer's output on the masked image is the coalition's
value.
"""

import numpy as np

from gameint import (
    Coalition,
    LinearScorer,
    MaskSpec,
    ProductScorer,
    apply_mask,
    interaction_profile_exact,
    make_game,
    mixup_input,
    partition_grid,
)

# 32x32 image cut into a 4x4 grid: 16 players of 8x8 pixels each.
regions = partition_grid((32, 32), 4, 4)
print("players:", len(regions), "| region sizes:", sorted({r.size for r in regions}))

# Non-divisible extents: the last patch per axis absorbs the remainder.
ragged = partition_grid((30, 30), 4, 4)
print("30x30 on a 4x4 grid, region sizes:",
      np.array([r.size for r in ragged]).reshape(4, 4))

# Masking: members keep their pixels, everything else becomes baseline.
rng = np.random.default_rng(1)
x = rng.normal(size=(4, 4))
spec = MaskSpec.grid((4, 4), 2, 2, baseline=0.0)
kept = Coalition.from_players(4, [0])
masked = apply_mask(x, kept, spec)
print("\nkeep only player 0 (top-left 2x2): nonzero pattern\n",
      (masked != 0).astype(int))

# A linear scorer induces an additive game: zero interactions everywhere.
linear_game = make_game(x, spec, LinearScorer(rng.normal(size=16), bias=0.2))
print("\nlinear scorer interactions (pair 0,3):",
      interaction_profile_exact(linear_game, 0, 3))

# A product of two regions induces a scaled AND between those players:
# constant interaction at every order.
product_game = make_game(np.abs(x) + 1.0, spec,
                         ProductScorer(spec.regions[0], spec.regions[3]))
print("product scorer interactions (pair 0,3):",
      interaction_profile_exact(product_game, 0, 3))

# Input blending happens on raw inputs before any masking.
x0, x1 = np.full((2, 2), 2.0), np.full((2, 2), 4.0)
print("\nblend with lam = 0.5:\n", mixup_input(x0, x1, 0.5))
