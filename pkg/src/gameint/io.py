"""File schemas: game fixtures, reward tables, strength profiles, metric
tables, baselines, and deterministic writers.

Every output file embeds the tool version and a sha256 of the resolved
run configuration; writers sort keys and never emit timestamps, so a
given configuration always produces byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
from pathlib import Path

import numpy as np

from . import __version__
from .augment import RewardTable, game_from_rewards
from .errors import ConfigError, ShapeMismatch
from .games import AdditiveGame, Game, GameSpec, PairAndGame, TabulatedGame
from .strength import AmrisParams, MetricTable, StrengthProfile


def config_hash(config: dict) -> str:
    """sha256 over the canonical JSON form of a config mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_json(path, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    Path(path).write_text(text)


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def csv_text(header: list[str], rows, meta: dict) -> str:
    """CSV with a leading comment line carrying version and config hash."""
    buf = _io.StringIO()
    pairs = " ".join(f"{k}={v}" for k, v in sorted(meta.items()))
    buf.write(f"# gameint={__version__} {pairs}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows, meta: dict) -> None:
    Path(path).write_text(csv_text(header, list(rows), meta))


# -- game fixtures ---------------------------------------------------------

def _scorer_from_fixture(obj: dict):
    from .masking import LinearScorer, ProductScorer

    kind = obj.get("kind")
    if kind == "linear":
        return LinearScorer(obj["weights"], float(obj.get("bias", 0.0)))
    if kind == "product":
        return ProductScorer(obj["idx_a"], obj["idx_b"])
    raise ConfigError(f"unknown scorer kind {kind!r}")


def game_from_fixture(obj: dict, baseline_path=None) -> Game:
    """Build a game from a fixture mapping.

    Kinds: "and" (n, pair, scale), "additive" (weights, bias),
    "table" (n, values[2^n], pair), "rewards" (table: reward-table form),
    "masked" (input, shape, grid: [rows, cols], scorer, baseline).
    A baseline file path overrides a masked fixture's inline baseline.
    """
    kind = obj.get("kind")
    if kind == "and":
        return PairAndGame(int(obj["n"]), tuple(obj["pair"]), float(obj.get("scale", 1.0)))
    if kind == "additive":
        return AdditiveGame(obj["weights"], float(obj.get("bias", 0.0)))
    if kind == "table":
        n = int(obj["n"])
        pair = tuple(obj["pair"]) if "pair" in obj else None
        return TabulatedGame(GameSpec(n=n, pair=pair), np.asarray(obj["values"]))
    if kind == "rewards":
        return game_from_rewards(reward_table_from_obj(obj["table"]))
    if kind == "masked":
        from .masking import MaskSpec, make_game

        shape = tuple(int(d) for d in obj["shape"])
        x = np.asarray(obj["input"], dtype=np.float64).reshape(shape)
        rows, cols = obj["grid"]
        if baseline_path is not None:
            baseline = load_baseline(baseline_path, shape)
        elif "baseline" in obj:
            baseline = np.asarray(obj["baseline"], dtype=np.float64).reshape(shape)
        else:
            baseline = None
        spec = MaskSpec.grid(shape, int(rows), int(cols), baseline=baseline)
        return make_game(x, spec, _scorer_from_fixture(obj["scorer"]))
    raise ConfigError(f"unknown game kind {kind!r}")


def load_game(path, baseline_path=None) -> Game:
    return game_from_fixture(read_json(path), baseline_path=baseline_path)


# -- reward tables ---------------------------------------------------------

def reward_table_from_obj(obj: dict) -> RewardTable:
    rewards = {
        tuple(sorted(entry["players"])): float(entry["value"])
        for entry in obj["rewards"]
    }
    return RewardTable(
        n=int(obj["n"]),
        pair=tuple(obj["pair"]),
        rewards=rewards,
        max_order=int(obj["max_order"]),
    )


def reward_table_to_obj(table: RewardTable) -> dict:
    entries = [
        {"players": list(t), "value": v}
        for t, v in sorted(table.rewards.items(), key=lambda kv: (len(kv[0]), kv[0]))
    ]
    return {
        "n": table.n,
        "pair": list(table.pair),
        "max_order": table.max_order,
        "rewards": entries,
    }


def load_reward_table(path) -> RewardTable:
    return reward_table_from_obj(read_json(path))


def save_reward_table(path, table: RewardTable) -> None:
    write_json(path, reward_table_to_obj(table))


# -- strength profiles -----------------------------------------------------

def profile_to_obj(profile: StrengthProfile, meta: dict | None = None) -> dict:
    obj = {
        "model_id": profile.model_id,
        "n": profile.n,
        "orders": list(profile.orders),
        "J": list(profile.J),
        "version": __version__,
    }
    if meta:
        obj.update(meta)
    return obj


def profile_from_obj(obj: dict) -> StrengthProfile:
    return StrengthProfile(
        model_id=str(obj["model_id"]),
        n=int(obj["n"]),
        orders=tuple(float(x) for x in obj["orders"]),
        J=tuple(float(x) for x in obj["J"]),
    )


def load_profile(path) -> StrengthProfile:
    return profile_from_obj(read_json(path))


def save_profile(path, profile: StrengthProfile, meta: dict | None = None) -> None:
    write_json(path, profile_to_obj(profile, meta))


# -- metric tables ---------------------------------------------------------

def load_metric_table(path) -> MetricTable:
    """CSV with header model_id,metric,value,polarity; polarity is
    "lower" or "higher" (which direction is more robust) and must agree
    across rows of one metric."""
    rows: dict[str, dict[str, float]] = {}
    lower: dict[str, bool] = {}
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    expected = {"model_id", "metric", "value", "polarity"}
    if reader.fieldnames is None or set(reader.fieldnames) != expected:
        raise ConfigError(
            f"metric CSV must have header {sorted(expected)}, got {reader.fieldnames}"
        )
    for record in reader:
        model = record["model_id"].strip()
        metric = record["metric"].strip()
        polarity = record["polarity"].strip().lower()
        if polarity not in ("lower", "higher"):
            raise ConfigError(f"polarity must be lower|higher, got {polarity!r}")
        is_lower = polarity == "lower"
        if metric in lower and lower[metric] != is_lower:
            raise ConfigError(f"conflicting polarity for metric {metric!r}")
        lower[metric] = is_lower
        rows.setdefault(model, {})[metric] = float(record["value"])
    if not rows:
        raise ConfigError("metric CSV has no data rows")
    return MetricTable(rows=rows, lower_is_better=lower)


def save_metric_table(path, table: MetricTable, meta: dict | None = None) -> None:
    rows = []
    for model in sorted(table.rows):
        for metric in sorted(table.rows[model]):
            polarity = "lower" if table.lower_is_better.get(metric, False) else "higher"
            rows.append([model, metric, table.rows[model][metric], polarity])
    write_csv(path, ["model_id", "metric", "value", "polarity"], rows, meta or {})


# -- baselines -------------------------------------------------------------

def load_baseline(path, shape) -> np.ndarray:
    """Baseline values for masked regions: a JSON array (any nesting) or
    a raw little-endian float64 binary, matching the input shape."""
    path = Path(path)
    size = int(np.prod(shape))
    if path.suffix == ".json":
        arr = np.asarray(json.loads(path.read_text()), dtype=np.float64)
    else:
        arr = np.frombuffer(path.read_bytes(), dtype="<f8").copy()
    if arr.size != size:
        raise ShapeMismatch(f"baseline has {arr.size} values, input needs {size}")
    return arr.reshape(shape)


# -- misc ------------------------------------------------------------------

def amris_params_from_obj(obj: dict) -> AmrisParams:
    return AmrisParams(a=float(obj["a"]), b=float(obj["b"]), c=float(obj["c"]))
