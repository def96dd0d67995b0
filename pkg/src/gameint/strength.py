"""Relative interaction strength profiles and the mid-order robustness
proxy.

A strength profile is the per-order mean absolute interaction divided by
its across-order average, so the profile always has mean 1 over its own
grid. The proxy compares the profile's mid-order band against its
low-order band, scaled by the reciprocal of the profile's range, and
takes a square root:

    proxy(a, b, c) = sqrt( (1 / (max J - min J))
                           * sum(J, floor(b n) .. floor(c n))
                           / sum(J, 0 .. floor(a n)) )

Band limits are inclusive after flooring. The profile is scale-free by
construction, so the band ratio is invariant to any uniform rescaling of
the raw strengths; the range factor is what makes the normalization
grid matter.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllCandidatesDegenerate,
    ConstantInput,
    DegenerateRaw,
    EmptyBand,
    FlatProfile,
    InsufficientModels,
    MissingMetric,
    ShapeMismatch,
    ZeroDenominator,
)
from .stats import pearson

LOW_CONFIDENCE_MODEL_COUNT = 4  # Pearson over so few models is unstable


@dataclass(frozen=True)
class StrengthProfile:
    """Normalized per-order interaction strength for one model.

    `orders` holds the grid as fractions m/n; `J` the strengths, mean 1
    over the grid.
    """

    model_id: str
    n: int
    orders: tuple[float, ...]
    J: tuple[float, ...]

    def __post_init__(self):
        if len(self.orders) != len(self.J) or not self.J:
            raise ShapeMismatch("orders and J must be equal-length and non-empty")
        if any(v < 0 for v in self.J):
            raise ValueError("strengths must be nonnegative")
        if abs(float(np.mean(self.J)) - 1.0) > 1e-9:
            raise ValueError("profile mean must be 1 (normalize first)")

    def int_orders(self) -> list[int]:
        return [math.floor(x * self.n + 1e-9) for x in self.orders]


def normalize_strength(raw, *, n: int, orders=None,
                       model_id: str = "model") -> StrengthProfile:
    """Divide a raw per-order strength vector by its mean.

    `orders` are the integer orders matching raw's entries (defaults to
    0, 1, ...). Raises DegenerateRaw when the raw vector is all zeros
    (an additive game has no interactions to normalize).
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 1 or raw.size == 0:
        raise ShapeMismatch("raw strength must be a non-empty 1-d vector")
    if np.any(raw < 0):
        raise ValueError("raw strengths must be nonnegative")
    mean = float(raw.mean())
    if mean == 0.0:
        raise DegenerateRaw("all-zero raw strengths cannot be normalized")
    if orders is None:
        orders = list(range(raw.size))
    if len(orders) != raw.size:
        raise ShapeMismatch("orders length must match raw length")
    J = raw / mean
    return StrengthProfile(
        model_id=model_id,
        n=n,
        orders=tuple(m / n for m in orders),
        J=tuple(float(v) for v in J),
    )


@dataclass(frozen=True)
class AmrisParams:
    """Band fractions: low band is orders 0..floor(a n), mid band is
    floor(b n)..floor(c n)."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        if not 0.0 <= self.a <= self.b <= self.c <= 1.0:
            raise ValueError(f"need 0 <= a <= b <= c <= 1, got {self}")


def amris(profile: StrengthProfile, params: AmrisParams, n: int | None = None) -> float:
    """Adjusted mid-order relative interaction strength of a profile.

    Raises FlatProfile when max(J) == min(J), EmptyBand when a band
    selects no grid orders, ZeroDenominator when the low band sums to 0.
    """
    if n is None:
        n = profile.n
    elif n != profile.n:
        raise ShapeMismatch(f"profile has n={profile.n}, got n={n}")

    J = np.asarray(profile.J, dtype=np.float64)
    j_max, j_min = float(J.max()), float(J.min())
    if j_max == j_min:
        raise FlatProfile("flat profile: range factor undefined")

    orders = np.asarray(profile.int_orders())
    lo_hi = math.floor(params.a * n + 1e-9)
    mid_lo = math.floor(params.b * n + 1e-9)
    mid_hi = math.floor(params.c * n + 1e-9)
    if mid_hi > n - 2:
        raise EmptyBand(f"mid band top {mid_hi} exceeds max order {n - 2}")

    low_sel = orders <= lo_hi
    mid_sel = (orders >= mid_lo) & (orders <= mid_hi)
    if not low_sel.any():
        raise EmptyBand(f"low band 0..{lo_hi} selects no grid orders")
    if not mid_sel.any():
        raise EmptyBand(f"mid band {mid_lo}..{mid_hi} selects no grid orders")

    denom = float(J[low_sel].sum())
    if denom == 0.0:
        raise ZeroDenominator("low band sums to zero")
    numer = float(J[mid_sel].sum())
    return math.sqrt(numer / denom / (j_max - j_min))


@dataclass(frozen=True)
class MetricTable:
    """Robustness metric values per model, with per-metric polarity.

    `rows` maps model id to {metric name: value}; `lower_is_better`
    marks metrics where smaller values mean a more robust model (error
    rates), so correlations can be oriented as higher = more robust.
    """

    rows: dict[str, dict[str, float]]
    lower_is_better: dict[str, bool]

    def metrics(self) -> list[str]:
        names = set()
        for row in self.rows.values():
            names.update(row)
        return sorted(names)

    def column(self, metric: str, model_ids) -> np.ndarray:
        out = []
        for mid in model_ids:
            row = self.rows.get(mid)
            if row is None or metric not in row:
                raise MissingMetric(f"model {mid!r} missing metric {metric!r}")
            out.append(row[metric])
        return np.asarray(out, dtype=np.float64)

    def orientation(self, metric: str) -> float:
        return -1.0 if self.lower_is_better.get(metric, False) else 1.0


@dataclass(frozen=True)
class GridSearchReport:
    """Winning band parameters plus per-metric oriented correlations."""

    params: AmrisParams
    mean_abs_r: float
    per_metric_r: dict[str, float]   # oriented: positive = proxy tracks robustness
    amris_by_model: dict[str, float]
    n_models: int
    low_confidence: bool
    candidates_evaluated: int
    candidates_degenerate: int


def candidate_triples(step: float) -> list[AmrisParams]:
    """All (a, b, c) on the step lattice with a <= b <= c."""
    if not 0 < step <= 1:
        raise ValueError("step must be in (0, 1]")
    count = round(1.0 / step)
    values = [round(k * step, 10) for k in range(count + 1)]
    return [
        AmrisParams(a, b, c)
        for a, b, c in itertools.combinations_with_replacement(values, 3)
    ]


def grid_search(profiles, metrics: MetricTable, step: float = 0.05) -> GridSearchReport:
    """Pick the band parameters whose proxy best tracks the metric table.

    Score of a candidate = mean over metrics of |Pearson r| between the
    per-model proxy values and the metric column; reported r values are
    sign-oriented so positive always means "proxy up, robustness up".
    Candidates failing on any model (flat profile, empty band, zero
    denominator, constant proxy) are skipped; ties break toward the
    lexicographically smallest (a, b, c).
    """
    profiles = list(profiles)
    if len(profiles) < 3:
        raise InsufficientModels(f"grid search needs >= 3 models, got {len(profiles)}")
    model_ids = [p.model_id for p in profiles]
    if len(set(model_ids)) != len(model_ids):
        raise ValueError(f"duplicate model ids: {model_ids}")
    ns = {p.n for p in profiles}
    if len(ns) > 1:
        raise ShapeMismatch(f"profiles disagree on n: {sorted(ns)}")
    grids = {p.orders for p in profiles}
    if len(grids) > 1:
        raise ShapeMismatch("profiles disagree on order grid")

    metric_names = metrics.metrics()
    columns = {m: metrics.column(m, model_ids) for m in metric_names}
    for name, col in columns.items():
        if float(col.std()) == 0.0:
            raise ConstantInput(f"metric {name!r} is constant across models")

    best: tuple[float, AmrisParams, dict[str, float], dict[str, float]] | None = None
    evaluated = 0
    degenerate = 0
    for params in candidate_triples(step):
        try:
            values = np.array([amris(p, params) for p in profiles])
        except (FlatProfile, EmptyBand, ZeroDenominator):
            degenerate += 1
            continue
        if float(values.std()) == 0.0:
            degenerate += 1
            continue
        evaluated += 1
        per_metric = {
            name: metrics.orientation(name) * pearson(values, columns[name])
            for name in metric_names
        }
        score = float(np.mean([abs(r) for r in per_metric.values()]))
        key = (params.a, params.b, params.c)
        if best is None or score > best[0] or (score == best[0] and key < (
                best[1].a, best[1].b, best[1].c)):
            by_model = {mid: float(v) for mid, v in zip(model_ids, values)}
            best = (score, params, per_metric, by_model)

    if best is None:
        raise AllCandidatesDegenerate(
            "every (a, b, c) candidate was degenerate on some model"
        )
    score, params, per_metric, by_model = best
    return GridSearchReport(
        params=params,
        mean_abs_r=score,
        per_metric_r=per_metric,
        amris_by_model=by_model,
        n_models=len(profiles),
        low_confidence=len(profiles) <= LOW_CONFIDENCE_MODEL_COUNT,
        candidates_evaluated=evaluated,
        candidates_degenerate=degenerate,
    )
