import json
import sys
from pathlib import Path

import numpy as np
import pytest

from gameint.errors import (
    BadGrid,
    ProtocolViolation,
    ScorerUnavailable,
    ShapeMismatch,
)
from gameint.exact import interaction_profile_exact
from gameint.games import Coalition
from gameint.masking import (
    ExternalGame,
    ExternalScorerClient,
    LinearScorer,
    MaskSpec,
    ProductScorer,
    ScorerEndpoint,
    apply_mask,
    make_game,
    mixup_input,
    partition_grid,
)

STUB = str(Path(__file__).with_name("stub_scorer.py"))


class TestPartitionGrid:
    def test_exact_division(self):
        regions = partition_grid((32, 32), 4, 4)
        assert len(regions) == 16
        assert all(r.size == 64 for r in regions)

    def test_one_by_two(self):
        regions = partition_grid((32, 32), 1, 2)
        assert len(regions) == 2
        assert all(r.size == 32 * 16 for r in regions)

    def test_remainder_goes_to_last_patch(self):
        regions = partition_grid((30, 30), 4, 4)
        sizes = np.array([r.size for r in regions]).reshape(4, 4)
        # per-axis run lengths 7,7,7,9
        expected = np.outer([7, 7, 7, 9], [7, 7, 7, 9])
        assert np.array_equal(sizes, expected)

    def test_channels_follow_their_pixel(self):
        regions = partition_grid((4, 4, 3), 2, 2)
        assert all(r.size == 2 * 2 * 3 for r in regions)
        x = np.arange(4 * 4 * 3).reshape(4, 4, 3)
        # region 0 is the top-left 2x2 block, all channels
        assert sorted(x.reshape(-1)[regions[0]]) == sorted(x[:2, :2, :].reshape(-1))

    def test_cover_is_exact_partition(self):
        regions = partition_grid((10, 7), 3, 2)
        counts = np.zeros(70, dtype=int)
        for r in regions:
            counts[r] += 1
        assert counts.min() == counts.max() == 1

    def test_bad_grids(self):
        with pytest.raises(BadGrid):
            partition_grid((8, 8), 1, 1)
        with pytest.raises(BadGrid):
            partition_grid((2, 2), 4, 4)
        with pytest.raises(BadGrid):
            partition_grid((16,), 2, 2)


class TestApplyMask:
    def make_spec(self):
        baseline = np.full((4, 4), -1.0)
        return MaskSpec.grid((4, 4), 2, 2, baseline=baseline)

    def test_full_coalition_is_identity(self, rng):
        spec = self.make_spec()
        x = rng.normal(size=(4, 4))
        out = apply_mask(x, Coalition.full(4), spec)
        assert np.array_equal(out, x)

    def test_empty_coalition_is_baseline(self, rng):
        spec = self.make_spec()
        x = rng.normal(size=(4, 4))
        out = apply_mask(x, Coalition.empty(4), spec)
        assert np.array_equal(out, spec.baseline)

    def test_single_region_mixes(self, rng):
        baseline = np.zeros((4, 4))
        spec = MaskSpec.grid((4, 4), 1, 2, baseline=baseline)
        x = rng.normal(size=(4, 4))
        out = apply_mask(x, Coalition.from_players(2, [0]), spec)
        assert np.array_equal(out[:, :2], x[:, :2])
        assert np.array_equal(out[:, 2:], np.zeros((4, 2)))

    def test_idempotent(self, rng):
        spec = self.make_spec()
        x = rng.normal(size=(4, 4))
        c = Coalition.from_players(4, [1, 2])
        once = apply_mask(x, c, spec)
        twice = apply_mask(once, c, spec)
        assert np.array_equal(once, twice)

    def test_shape_checked(self, rng):
        spec = self.make_spec()
        with pytest.raises(ShapeMismatch):
            apply_mask(np.zeros((3, 3)), Coalition.full(4), spec)
        with pytest.raises(ShapeMismatch):
            apply_mask(np.zeros((4, 4)), Coalition.full(5), spec)

    def test_overlapping_regions_rejected(self):
        regions = (np.array([0, 1]), np.array([1, 2, 3]))
        with pytest.raises(BadGrid):
            MaskSpec((2, 2), regions, np.zeros((2, 2)))


class TestMixupInput:
    def test_endpoints_exact(self, rng):
        x0 = rng.normal(size=(3, 3))
        x1 = rng.normal(size=(3, 3))
        assert np.array_equal(mixup_input(x0, x1, 1.0), x0)
        assert np.array_equal(mixup_input(x0, x1, 0.0), x1)

    def test_midpoint(self):
        x0 = np.full((2, 2), 2.0)
        x1 = np.full((2, 2), 4.0)
        assert np.array_equal(mixup_input(x0, x1, 0.5), np.full((2, 2), 3.0))

    def test_accepts_mix_config(self):
        from gameint.augment import MixConfig

        x0 = np.zeros(4)
        x1 = np.ones(4)
        assert mixup_input(x0, x1, MixConfig(lam=0.25)) == pytest.approx(np.full(4, 0.75))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatch):
            mixup_input(np.zeros(3), np.zeros(4), 0.5)


class TestBuiltinScorerGames:
    def test_linear_scorer_induces_additive_game(self, rng):
        x = rng.normal(size=(4, 4))
        weights = rng.normal(size=16)
        spec = MaskSpec.grid((4, 4), 2, 2)
        game = make_game(x, spec, LinearScorer(weights, bias=0.3))
        profile = interaction_profile_exact(game, 0, 3)
        assert profile == pytest.approx(np.zeros(3), abs=1e-12)
        # v(N) equals the raw score
        raw = float(weights @ x.reshape(-1) + 0.3)
        assert game.value(Coalition.full(4)) == pytest.approx(raw, abs=1e-12)

    def test_linear_game_empty_value_is_bias(self, rng):
        x = rng.normal(size=(4, 4))
        game = make_game(x, MaskSpec.grid((4, 4), 2, 2),
                         LinearScorer(np.ones(16), bias=2.5))
        assert game.value(Coalition.empty(4)) == pytest.approx(2.5)

    def test_product_scorer_induces_and_like_game(self, rng):
        x = np.abs(rng.normal(size=(4, 4))) + 0.5
        spec = MaskSpec.grid((4, 4), 2, 2)
        scorer = ProductScorer(spec.regions[0], spec.regions[3])
        game = make_game(x, spec, scorer)
        profile = interaction_profile_exact(game, 0, 3)
        scale = x.reshape(-1)[spec.regions[0]].sum() * x.reshape(-1)[spec.regions[3]].sum()
        assert profile == pytest.approx(np.full(3, scale), rel=1e-12)
        # non-designated pair carries nothing
        other = interaction_profile_exact(game, 1, 2)
        assert other == pytest.approx(np.zeros(3), abs=1e-9 * scale)


def stub_config(tmp_path, rng, mode="linear", n=4):
    shape = (4, 4)
    spec = MaskSpec.grid(shape, 2, 2, baseline=np.zeros(shape))
    x = rng.normal(size=shape)
    weights = rng.normal(size=16)
    cfg = {
        "n": n,
        "inputs": {"img0": list(map(float, x.reshape(-1)))},
        "baseline": [0.0] * 16,
        "regions": [list(map(int, r)) for r in spec.regions],
        "weights": list(map(float, weights)),
        "bias": 0.125,
        "mode": mode,
    }
    path = tmp_path / "stub.json"
    path.write_text(json.dumps(cfg))
    endpoint = ScorerEndpoint(command=(sys.executable, STUB, str(path)), batch_limit=32)
    local_game = make_game(x, spec, LinearScorer(weights, bias=0.125))
    return endpoint, local_game


class TestExternalScorer:
    def test_agrees_with_builtin_scorer(self, tmp_path, rng):
        endpoint, local = stub_config(tmp_path, rng)
        with ExternalScorerClient(endpoint) as client:
            remote = ExternalGame(client, "img0")
            masks = rng.integers(0, 16, size=100)
            got = remote.evaluate_masks(masks)
            want = local.evaluate_masks(masks)
            assert got == pytest.approx(want, abs=1e-6)

    def test_full_mask_equals_raw_score(self, tmp_path, rng):
        endpoint, local = stub_config(tmp_path, rng)
        with ExternalScorerClient(endpoint) as client:
            remote = ExternalGame(client, "img0")
            assert remote.value(Coalition.full(4)) == pytest.approx(
                local.value(Coalition.full(4)), abs=1e-6)

    def test_handshake_carries_inputs(self, tmp_path, rng):
        endpoint, _ = stub_config(tmp_path, rng)
        with ExternalScorerClient(endpoint) as client:
            assert client.handshake.n == 4
            assert client.handshake.input_ids == ["img0"]
            with pytest.raises(ProtocolViolation):
                ExternalGame(client, "missing")

    def test_nan_score_is_protocol_violation(self, tmp_path, rng):
        endpoint, _ = stub_config(tmp_path, rng, mode="nan")
        with ExternalScorerClient(endpoint) as client:
            remote = ExternalGame(client, "img0")
            with pytest.raises(ProtocolViolation):
                remote.value(Coalition.full(4))

    def test_garbage_line_is_protocol_violation(self, tmp_path, rng):
        endpoint, _ = stub_config(tmp_path, rng, mode="badjson")
        with ExternalScorerClient(endpoint) as client:
            remote = ExternalGame(client, "img0")
            with pytest.raises(ProtocolViolation):
                remote.value(Coalition.full(4))

    def test_mismatched_id_is_protocol_violation(self, tmp_path, rng):
        endpoint, _ = stub_config(tmp_path, rng, mode="wrongid")
        with ExternalScorerClient(endpoint) as client:
            remote = ExternalGame(client, "img0")
            with pytest.raises(ProtocolViolation):
                remote.value(Coalition.full(4))

    def test_unstartable_command(self):
        endpoint = ScorerEndpoint(command=("/nonexistent/scorer",))
        with pytest.raises(ScorerUnavailable):
            ExternalScorerClient(endpoint)

    def test_unresponsive_scorer_times_out(self, tmp_path, rng):
        from gameint.errors import ScorerTimeout

        endpoint, _ = stub_config(tmp_path, rng, mode="hang")
        endpoint = ScorerEndpoint(command=endpoint.command, timeout=0.5)
        with ExternalScorerClient(endpoint) as client:
            remote = ExternalGame(client, "img0")
            with pytest.raises(ScorerTimeout):
                remote.value(Coalition.full(4))
