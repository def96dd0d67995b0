import numpy as np
import pytest

from gameint.errors import IndexOutOfRange, PlayerInCoalition, ShapeMismatch
from gameint.games import (
    AdditiveGame,
    Coalition,
    GameSpec,
    PairAndGame,
    TabulatedGame,
    ValueCache,
    delta_v,
    evaluate_cached,
    gray_order_masks,
)


class TestCoalition:
    def test_roundtrips(self):
        c = Coalition.from_players(6, [0, 2, 5])
        assert c.mask == 0b100101
        assert c.members() == (0, 2, 5)
        assert Coalition.from_bits(c.bits()) == c
        assert Coalition.from_mask_string(c.mask_string()) == c
        assert c.mask_string() == "101001"  # player 0 first

    def test_set_operations(self):
        c = Coalition.from_players(5, [1, 3])
        assert len(c) == 2
        assert 1 in c and 0 not in c
        assert c.complement().members() == (0, 2, 4)
        assert c.union(Coalition.from_players(5, [0])).members() == (0, 1, 3)

    def test_adding_new_member_grows_by_one(self, rng):
        for _ in range(200):
            n = int(rng.integers(2, 12))
            mask = int(rng.integers(0, 1 << n))
            c = Coalition(n, mask)
            outside = [p for p in range(n) if p not in c]
            if not outside:
                continue
            p = int(rng.choice(outside))
            assert len(c.add(p)) == len(c) + 1

    def test_bounds_checked(self):
        with pytest.raises(IndexOutOfRange):
            Coalition.from_players(4, [4])
        with pytest.raises(IndexOutOfRange):
            Coalition(3, 0b1000)
        with pytest.raises(ShapeMismatch):
            Coalition(3, 0).union(Coalition(4, 0))


class TestGameSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            GameSpec(n=1)
        with pytest.raises(ValueError):
            GameSpec(n=4, pair=(2, 2))
        with pytest.raises(IndexOutOfRange):
            GameSpec(n=4, pair=(0, 4))


class TestGames:
    def test_tabulated_is_referentially_transparent(self, rng):
        g = TabulatedGame.random(8, rng)
        coalitions = [Coalition(8, int(rng.integers(0, 256))) for _ in range(50)]
        first = g.evaluate(coalitions)
        second = g.evaluate(coalitions)
        assert np.array_equal(first, second)

    def test_definedness_on_extremes(self):
        g = PairAndGame(5, (1, 3))
        assert g.value(Coalition.empty(5)) == 0.0
        assert g.value(Coalition.full(5)) == 1.0

    def test_gray_order_covers_all_masks_adjacently(self):
        masks = gray_order_masks(6)
        assert sorted(masks) == list(range(64))
        diffs = masks[1:] ^ masks[:-1]
        assert all(int(d).bit_count() == 1 for d in diffs)

    def test_value_table_matches_evaluate(self, rng):
        g = TabulatedGame.random(6, rng)
        table = g.value_table()
        for mask in range(64):
            assert table[mask] == g.value(Coalition(6, mask))


class TestDeltaV:
    def test_additive_game_has_zero_second_difference(self, rng):
        g = AdditiveGame(rng.uniform(-2, 2, size=7), bias=0.3)
        for _ in range(30):
            mask = int(rng.integers(0, 1 << 7))
            c = Coalition(7, mask)
            free = [p for p in range(7) if p not in c]
            if len(free) < 2:
                continue
            i, j = rng.choice(free, size=2, replace=False)
            assert delta_v(g, int(i), int(j), c) == pytest.approx(0.0, abs=1e-12)

    def test_and_game_is_one_everywhere(self):
        g = PairAndGame(6, (0, 1))
        for mask in (0, 0b100, 0b111100):
            assert delta_v(g, 0, 1, Coalition(6, mask)) == 1.0

    def test_matches_direct_table_lookup(self, rng):
        g = TabulatedGame.random(6, rng)
        s = Coalition.from_players(6, [2, 4])
        t = g.values
        expected = t[0b010111] - t[0b010101] - t[0b010110] + t[0b010100]
        assert delta_v(g, 0, 1, s) == expected

    def test_symmetric_in_i_and_j(self, rng):
        g = TabulatedGame.random(6, rng)
        s = Coalition.from_players(6, [3])
        assert delta_v(g, 0, 5, s) == delta_v(g, 5, 0, s)

    def test_rejects_members_of_context(self):
        g = PairAndGame(4, (0, 1))
        with pytest.raises(PlayerInCoalition):
            delta_v(g, 0, 1, Coalition.from_players(4, [1, 2]))
        with pytest.raises(IndexOutOfRange):
            delta_v(g, 0, 9, Coalition.empty(4))


class TestValueCache:
    def test_hit_returns_same_score_without_reevaluation(self, rng):
        g = TabulatedGame.random(5, rng)
        cache = ValueCache()
        c = Coalition.from_players(5, [0, 2])
        first = evaluate_cached(g, c, cache)
        assert cache.misses == 1
        second = evaluate_cached(g, c, cache)
        assert second == first
        assert cache.hits == 1

    def test_cached_score_equals_fresh_evaluation(self, rng):
        g = TabulatedGame.random(6, rng)
        cache = ValueCache()
        for _ in range(100):
            c = Coalition(6, int(rng.integers(0, 64)))
            assert evaluate_cached(g, c, cache) == g.value(c)

    def test_capacity_bound_holds(self, rng):
        g = TabulatedGame.random(6, rng)
        cache = ValueCache(capacity=8)
        for mask in range(64):
            evaluate_cached(g, Coalition(6, mask), cache)
        assert len(cache) <= 8

    def test_lru_evicts_oldest(self, rng):
        g = TabulatedGame.random(4, rng)
        cache = ValueCache(capacity=2)
        evaluate_cached(g, Coalition(4, 1), cache)
        evaluate_cached(g, Coalition(4, 2), cache)
        evaluate_cached(g, Coalition(4, 1), cache)  # refresh 1
        evaluate_cached(g, Coalition(4, 4), cache)  # evicts 2
        assert cache.get(1) is not None
        assert cache.get(2) is None

    def test_empty_coalition_on_additive_gives_bias(self):
        g = AdditiveGame([1.0, 2.0], bias=0.25)
        cache = ValueCache()
        assert evaluate_cached(g, Coalition.empty(2), cache) == 0.25

    def test_delta_v_makes_exactly_four_cache_touches(self, rng):
        g = TabulatedGame.random(5, rng)
        cache = ValueCache()
        delta_v(g, 0, 1, Coalition.from_players(5, [3]), cache=cache)
        assert cache.hits + cache.misses == 4
        assert cache.misses == 4

    def test_concurrent_use_never_returns_wrong_scores(self, rng):
        from concurrent.futures import ThreadPoolExecutor

        g = TabulatedGame.random(8, rng)
        cache = ValueCache(capacity=64)
        masks = list(rng.integers(0, 256, size=400))

        def check(mask):
            return evaluate_cached(g, Coalition(8, int(mask)), cache) == g.values[mask]

        with ThreadPoolExecutor(max_workers=8) as pool:
            assert all(pool.map(check, masks))
