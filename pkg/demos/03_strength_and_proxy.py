"""Strength profiles, the mid-order robustness proxy, and its band grid
search against a table of robustness metrics.
"""

import numpy as np

from gameint import (
    AmrisParams,
    MetricTable,
    amris,
    grid_search,
    normalize_strength,
)

# Normalizing divides by the across-order mean, so profiles of models
# with different absolute interaction scales become comparable.
raw = [2.0, 1.0, 1.0]
profile = normalize_strength(raw, n=4, model_id="tiny")
print("raw strengths:", raw, "-> J:", profile.J)

# The proxy compares mid-band mass to low-band mass, damped by the
# profile's range. Worked example: low band sums to 4, mid band to 2.5,
# range is 1.5.
J = [2.0, 1.0, 1.0, 0.5, 0.5, 1.0, 1.0, 1.0, 1.0]
hand = normalize_strength(J, n=10, model_id="hand")
value = amris(hand, AmrisParams(a=0.2, b=0.4, c=0.6))
print("\nworked proxy example:", value, "= sqrt((1/1.5)*(2.5/4.0))")

# Grid search: five synthetic models whose metric is an exact affine
# function of the proxy at hidden bands (0.2, 0.4, 0.6). The search
# scans every a <= b <= c on a 0.05 lattice and scores candidates by the
# mean |Pearson r| across metrics, oriented so higher always means more
# robust.
rng = np.random.default_rng(3)
star = AmrisParams(0.2, 0.4, 0.6)
profiles = [
    normalize_strength(rng.uniform(0.2, 2.0, size=9), n=10, model_id=f"model{k}")
    for k in range(5)
]
rows = {}
for p in profiles:
    v = amris(p, star)
    rows[p.model_id] = {
        "robust_acc": 2.0 * v + 1.0,          # higher is better
        "corruption_err": 5.0 - 3.0 * v,      # lower is better
    }
metrics = MetricTable(rows=rows, lower_is_better={"corruption_err": True,
                                                  "robust_acc": False})
report = grid_search(profiles, metrics, step=0.05)
print("\ngrid search over", report.candidates_evaluated, "candidates")
print("  best bands:", (report.params.a, report.params.b, report.params.c))
print("  mean |r|:", report.mean_abs_r)
print("  oriented r per metric:", report.per_metric_r)
print("  low-confidence flag (<= 4 models):", report.low_confidence)
