"""Command-line entry point.

Subcommands: exact, estimate, profile, amris, gridsearch, verify,
correlate. Every command can read defaults from a JSON config file
(--config); explicit flags override it, unknown config keys are
rejected. Outputs are byte-identical for identical configurations;
worker count comes from the GAMEINT_WORKERS environment variable and
never changes results.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .augment import (
    RewardTable,
    cutout_ratio,
    game_from_rewards,
    mix_games,
    permute_table,
    reward_shift_invariance_check,
    reward_sum_interaction,
    suppress_low_order,
    suppression_shift_report,
)
from .errors import ConfigError, GameintError
from .estimator import (
    WORKERS_ENV_VAR,
    InputSet,
    SampleConfig,
    estimate_interaction,
    raw_order_strength,
)
from .exact import interaction_profile_exact
from .games import TabulatedGame
from .io import (
    config_hash,
    game_from_fixture,
    load_game,
    load_metric_table,
    load_profile,
    profile_to_obj,
    read_json,
    write_csv,
    write_json,
)
from .masking import ExternalGame, ExternalScorerClient, ScorerEndpoint
from .stats import pearson
from .strength import AmrisParams, amris, grid_search, normalize_strength

DEFAULTS = {
    "seed": 0,
    "samples": 200,
    "pairs": 20,
    "grid": None,       # normalized order grid, comma string or list
    "step": 0.05,
    "class_index": 0,
    "model_id": "model",
}


def _fail(exc: Exception) -> int:
    record = {"error": {"type": type(exc).__name__, "message": str(exc)}}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return 1


OUTPUT_KEYS = {"out", "plot_out", "scatter_out"}


def _hashable(command: str, resolved: dict) -> dict:
    """Config view used for hashing: parameters that shape results, not
    where they are written."""
    return {"command": command,
            **{k: v for k, v in resolved.items() if k not in OUTPUT_KEYS}}


def _resolve(args: argparse.Namespace, allowed: set[str]) -> dict:
    """Merge CLI flags over config-file values over defaults; reject
    unknown config keys. Returns the resolved mapping used for hashing."""
    config = {}
    if args.config:
        config = read_json(args.config)
        unknown = set(config) - allowed
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    resolved = {}
    for key in allowed:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            resolved[key] = cli_val
        elif key in config:
            resolved[key] = config[key]
        else:
            resolved[key] = DEFAULTS.get(key)
    return resolved


def _parse_grid(value) -> tuple[float, ...] | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = [float(tok) for tok in value.split(",") if tok.strip()]
    return tuple(float(v) for v in value)


def _parse_pair(value) -> tuple[int, int]:
    i, j = (int(tok) for tok in str(value).split(","))
    return i, j


def _sample_config(resolved: dict) -> SampleConfig:
    grid = _parse_grid(resolved.get("grid"))
    kwargs = dict(
        seed=int(resolved["seed"]),
        subsets_per_order=int(resolved["samples"]),
        pairs_per_input=int(resolved.get("pairs") or 1),
    )
    if grid is not None:
        kwargs["order_grid"] = grid
    return SampleConfig(**kwargs)


def _pairs_for_game(game, pair_arg) -> list[tuple[int, int]]:
    if pair_arg is not None:
        return [_parse_pair(pair_arg)]
    if game.spec.pair is not None:
        return [game.spec.pair]
    n = game.n
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


# -- commands ---------------------------------------------------------------

def cmd_exact(args) -> int:
    allowed = {"game", "pair", "out", "baseline"}
    resolved = _resolve(args, allowed)
    game = load_game(resolved["game"], baseline_path=resolved.get("baseline"))
    rows = []
    for i, j in _pairs_for_game(game, resolved.get("pair")):
        profile = interaction_profile_exact(game, i, j)
        for m, value in enumerate(profile):
            rows.append([i, j, m, float(value)])
    meta = {"config_sha256": config_hash(_hashable("exact", resolved))}
    write_csv(resolved["out"], ["i", "j", "m", "value"], rows, meta)
    return 0


def cmd_estimate(args) -> int:
    allowed = {"game", "pair", "seed", "samples", "grid", "out", "baseline"}
    resolved = _resolve(args, allowed)
    game = load_game(resolved["game"], baseline_path=resolved.get("baseline"))
    cfg = _sample_config(resolved)
    i, j = _parse_pair(resolved["pair"])
    rows = []
    for m in cfg.orders_for(game.n):
        est = estimate_interaction(game, i, j, m, cfg)
        rows.append([est.i, est.j, est.m, est.mean, est.std_error,
                     est.n_samples, int(est.exhaustive)])
    meta = {"config_sha256": config_hash(_hashable("estimate", resolved))}
    write_csv(
        resolved["out"],
        ["i", "j", "m", "mean", "std_error", "n_samples", "exhaustive"],
        rows, meta,
    )
    return 0


def _input_set(resolved: dict):
    """InputSet from a fixture file or an external scorer command."""
    if resolved.get("inputs"):
        spec = read_json(resolved["inputs"])
        items = tuple(
            (str(entry["id"]),
             game_from_fixture(entry["game"], baseline_path=resolved.get("baseline")))
            for entry in spec["inputs"]
        )
        return InputSet(items), spec.get("model_id")
    if resolved.get("scorer_cmd"):
        endpoint = ScorerEndpoint(command=tuple(str(resolved["scorer_cmd"]).split()))
        client = ExternalScorerClient(endpoint)
        items = tuple(
            (input_id, ExternalGame(client, input_id, int(resolved["class_index"])))
            for input_id in client.handshake.input_ids
        )
        return InputSet(items), None
    raise ConfigError("need --inputs or --scorer-cmd")


def cmd_profile(args) -> int:
    allowed = {"inputs", "scorer_cmd", "class_index", "seed", "samples",
               "pairs", "grid", "model_id", "out", "plot_out", "baseline"}
    resolved = _resolve(args, allowed)
    inputs, fixture_model_id = _input_set(resolved)
    model_id = resolved["model_id"]
    if model_id == DEFAULTS["model_id"] and fixture_model_id:
        model_id = str(fixture_model_id)
    cfg = _sample_config(resolved)
    orders, raw = raw_order_strength(inputs, cfg)
    profile = normalize_strength(raw, n=inputs.n, orders=orders, model_id=model_id)
    sha = config_hash(_hashable("profile", resolved))
    write_json(resolved["out"], profile_to_obj(profile, {"config_sha256": sha}))
    if resolved.get("plot_out"):
        rows = [[x, j] for x, j in zip(profile.orders, profile.J)]
        write_csv(resolved["plot_out"], ["order_over_n", "J"], rows,
                  {"config_sha256": sha, "model_id": model_id})
    return 0


def cmd_amris(args) -> int:
    allowed = {"profile", "a", "b", "c", "out"}
    resolved = _resolve(args, allowed)
    for band in ("a", "b", "c"):
        if resolved[band] is None:
            raise ConfigError(f"missing band parameter --{band}")
    profile = load_profile(resolved["profile"])
    params = AmrisParams(float(resolved["a"]), float(resolved["b"]), float(resolved["c"]))
    value = amris(profile, params)
    payload = {
        "model_id": profile.model_id,
        "a": params.a, "b": params.b, "c": params.c,
        "amris": value,
        "version": __version__,
        "config_sha256": config_hash(_hashable("amris", resolved)),
    }
    if resolved.get("out"):
        write_json(resolved["out"], payload)
    else:
        print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_gridsearch(args) -> int:
    allowed = {"profiles", "metrics", "step", "out"}
    resolved = _resolve(args, allowed)
    profiles = [load_profile(p) for p in resolved["profiles"]]
    metrics = load_metric_table(resolved["metrics"])
    report = grid_search(profiles, metrics, step=float(resolved["step"]))
    payload = {
        "best": {"a": report.params.a, "b": report.params.b, "c": report.params.c},
        "mean_abs_r": report.mean_abs_r,
        "per_metric_r": report.per_metric_r,
        "amris_by_model": report.amris_by_model,
        "n_models": report.n_models,
        "low_confidence": report.low_confidence,
        "candidates_evaluated": report.candidates_evaluated,
        "candidates_degenerate": report.candidates_degenerate,
        "step": float(resolved["step"]),
        "version": __version__,
        "config_sha256": config_hash(_hashable("gridsearch", resolved)),
    }
    write_json(resolved["out"], payload)
    return 0


def cmd_correlate(args) -> int:
    allowed = {"profiles", "metrics", "a", "b", "c", "out", "scatter_out"}
    resolved = _resolve(args, allowed)
    for band in ("a", "b", "c"):
        if resolved[band] is None:
            raise ConfigError(f"missing band parameter --{band}")
    profiles = [load_profile(p) for p in resolved["profiles"]]
    metrics = load_metric_table(resolved["metrics"])
    params = AmrisParams(float(resolved["a"]), float(resolved["b"]), float(resolved["c"]))
    model_ids = [p.model_id for p in profiles]
    values = np.array([amris(p, params) for p in profiles])
    sha = config_hash(_hashable("correlate", resolved))
    rows = []
    scatter = []
    for metric in metrics.metrics():
        column = metrics.column(metric, model_ids)
        r = metrics.orientation(metric) * pearson(values, column)
        polarity = "lower" if metrics.lower_is_better.get(metric, False) else "higher"
        rows.append([metric, r, polarity, len(model_ids)])
        for mid, v, y in zip(model_ids, values, column):
            scatter.append([metric, mid, float(v), float(y)])
    write_csv(resolved["out"], ["metric", "r_oriented", "polarity", "n_models"],
              rows, {"config_sha256": sha})
    if resolved.get("scatter_out"):
        write_csv(resolved["scatter_out"], ["metric", "model_id", "amris", "value"],
                  scatter, {"config_sha256": sha})
    return 0


# -- verification suite ------------------------------------------------------

def _verify_checks(seed: int):
    rng = np.random.default_rng(seed)
    yield "reward_sum_identity", _check_reward_sum(rng)
    yield "cutout_compression_bound", _check_cutout(rng)
    yield "mix_linearity", _check_mix_linearity(rng)
    yield "low_order_suppression_shift", _check_suppression(rng)
    yield "context_relabel_invariance", _check_relabel(rng)


def _check_reward_sum(rng) -> dict:
    worst = 0.0
    for _ in range(5):
        table = RewardTable.random(8, (1, 5), rng, low=-1.0, high=1.0, max_order=6)
        profile = interaction_profile_exact(game_from_rewards(table), 1, 5)
        for k in range(7):
            formula = reward_sum_interaction(table, k)
            err = abs(profile[k] - formula) / max(1.0, abs(formula))
            worst = max(worst, err)
    return {"passed": bool(worst <= 1e-9), "max_rel_error": float(worst), "tolerance": 1e-9}


def _check_cutout(rng) -> dict:
    violations = 0
    eq_misses = 0
    for _ in range(20):
        table = RewardTable.random(8, (0, 1), rng, low=0.0, high=1.0, max_order=6)
        for k in range(7):
            for r in range(k + 1):
                ratio = cutout_ratio(table, k, r)
                if ratio > 1.0 + 1e-12:
                    violations += 1
                if r == k and abs(ratio - 1.0) > 1e-12:
                    eq_misses += 1
    passed = violations == 0 and eq_misses == 0
    return {"passed": passed, "bound_violations": violations,
            "equality_misses": eq_misses}


def _check_mix_linearity(rng) -> dict:
    worst = 0.0
    for _ in range(10):
        u = TabulatedGame.random(8, rng)
        v = TabulatedGame.random(8, rng)
        w = mix_games(u, v)
        for i in range(8):
            for j in range(i + 1, 8):
                lhs = interaction_profile_exact(w, i, j)
                rhs = interaction_profile_exact(u, i, j) + interaction_profile_exact(v, i, j)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return {"passed": bool(worst <= 1e-12), "max_abs_error": float(worst), "tolerance": 1e-12}


def _check_suppression(rng) -> dict:
    failures = 0
    for _ in range(10):
        table = RewardTable.random(10, (0, 1), rng, low=0.5, high=1.5)
        shift = suppression_shift_report(table, q_star=1, factor=0.5)
        if not (shift.low_dropped and shift.mid_raised):
            failures += 1
    return {"passed": failures == 0, "failures": failures, "tables": 10}


def _check_relabel(rng) -> dict:
    ok = True
    for _ in range(5):
        table = RewardTable.random(8, (2, 6), rng, low=-1.0, high=1.0, max_order=6)
        context = table.context_players()
        shuffled = list(context)
        rng.shuffle(shuffled)
        perm = {p: p for p in range(8)}
        perm.update(dict(zip(context, shuffled)))
        ok = ok and reward_shift_invariance_check(table, perm)
        identity = {p: p for p in range(8)}
        ok = ok and reward_shift_invariance_check(table, identity)
    return {"passed": bool(ok)}


def cmd_verify(args) -> int:
    allowed = {"seed", "out"}
    resolved = _resolve(args, allowed)
    seed = int(resolved["seed"])
    results = {}
    all_passed = True
    for name, result in _verify_checks(seed):
        results[name] = result
        all_passed = all_passed and result["passed"]
        print(f"{'PASS' if result['passed'] else 'FAIL'} {name}")
    if resolved.get("out"):
        payload = {
            "checks": results,
            "all_passed": all_passed,
            "version": __version__,
            "config_sha256": config_hash(_hashable("verify", resolved)),
        }
        write_json(resolved["out"], payload)
    return 0 if all_passed else 1


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gameint",
        description="Multi-order game interaction toolkit: exact and sampled "
                    "interaction indices, strength profiles, the mid-order "
                    "robustness proxy, and augmentation-mechanism checks.",
        epilog=f"Worker count comes from the {WORKERS_ENV_VAR} environment "
               "variable (default 1); results never depend on it.",
    )
    parser.add_argument("--version", action="version", version=f"gameint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with defaults for this command")

    p = sub.add_parser("exact", help="exact interaction table for a game fixture")
    add_common(p)
    p.add_argument("--game", help="game fixture JSON")
    p.add_argument("--pair", help="target pair 'i,j' (default: fixture pair or all)")
    p.add_argument("--baseline", help="baseline file for masked fixtures")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("estimate", help="Monte Carlo interaction estimates")
    add_common(p)
    p.add_argument("--game", help="game fixture JSON")
    p.add_argument("--pair", help="target pair 'i,j'")
    p.add_argument("--seed", type=int, help="sampling seed")
    p.add_argument("--samples", type=int, help="subset draws per order")
    p.add_argument("--grid", help="normalized orders, e.g. '0,0.25,0.5'")
    p.add_argument("--baseline", help="baseline file for masked fixtures")
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("profile", help="strength profile over an input set")
    add_common(p)
    p.add_argument("--inputs", help="input-set fixture JSON")
    p.add_argument("--scorer-cmd", dest="scorer_cmd",
                   help="external scorer command line (wire protocol)")
    p.add_argument("--class", dest="class_index", type=int,
                   help="output class index for external scorers")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="subset draws per order")
    p.add_argument("--pairs", type=int, help="sampled pairs per input")
    p.add_argument("--grid", help="normalized orders, e.g. '0,0.1,0.2'")
    p.add_argument("--model-id", dest="model_id", help="profile model id")
    p.add_argument("--baseline", help="baseline file for masked fixtures")
    p.add_argument("--out", help="profile JSON path")
    p.add_argument("--plot-out", dest="plot_out", help="J-curve plot data CSV")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("amris", help="robustness proxy of one profile")
    add_common(p)
    p.add_argument("--profile", help="profile JSON path")
    p.add_argument("--a", type=float, help="low band top fraction")
    p.add_argument("--b", type=float, help="mid band bottom fraction")
    p.add_argument("--c", type=float, help="mid band top fraction")
    p.add_argument("--out", help="output JSON (default: print)")
    p.set_defaults(func=cmd_amris)

    p = sub.add_parser("gridsearch", help="search band parameters against metrics")
    add_common(p)
    p.add_argument("--profiles", nargs="+", help="profile JSON paths")
    p.add_argument("--metrics", help="metric table CSV")
    p.add_argument("--step", type=float, help="band lattice step (default 0.05)")
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("verify", help="run the augmentation-mechanism checks")
    add_common(p)
    p.add_argument("--seed", type=int, help="fixture seed")
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("correlate", help="proxy-vs-metric correlations")
    add_common(p)
    p.add_argument("--profiles", nargs="+", help="profile JSON paths")
    p.add_argument("--metrics", help="metric table CSV")
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--out", help="correlation CSV path")
    p.add_argument("--scatter-out", dest="scatter_out",
                   help="per-model scatter data CSV")
    p.set_defaults(func=cmd_correlate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GameintError, FileNotFoundError, ValueError, KeyError) as exc:
        return _fail(exc)


if __name__ == "__main__":
    sys.exit(main())
