"""Driving an external scorer over the wire protocol.

Scorers can live in another process (another runtime, a GPU host, a
served model). The protocol is line-delimited JSON over stdin/stdout:
the scorer announces its player count and input ids in a handshake, then
answers {"id", "input_id", "mask", "class"} requests with {"id",
"score"}. Masks travel as '0'/'1' strings (player 0 first); pixels stay
on the scorer side.

This demo writes a minimal self-contained scorer to a temp file and
talks to it. The refscorer package provides the full reference scorer
with the same protocol (see its README).
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from gameint import (
    ExternalGame,
    ExternalScorerClient,
    LinearScorer,
    MaskSpec,
    ScorerEndpoint,
    interaction_profile_exact,
    make_game,
)

SCORER_SOURCE = '''
import json, sys
cfg = json.loads(open(sys.argv[1]).read())
x, w, b = cfg["input"], cfg["weights"], cfg["bias"]
print(json.dumps({"protocol": 1, "n": cfg["n"], "input_ids": ["img0"]}), flush=True)
for line in sys.stdin:
    req = json.loads(line)
    vals = list(cfg["baseline"])
    for player, bit in enumerate(req["mask"]):
        if bit == "1":
            for idx in cfg["regions"][player]:
                vals[idx] = x[idx]
    score = sum(wi * vi for wi, vi in zip(w, vals)) + b
    print(json.dumps({"id": req["id"], "score": score}), flush=True)
'''

rng = np.random.default_rng(8)
x = rng.normal(size=(4, 4))
weights = rng.normal(size=16)
spec = MaskSpec.grid((4, 4), 2, 2)

with tempfile.TemporaryDirectory() as tmp:
    scorer_py = Path(tmp) / "scorer.py"
    scorer_py.write_text(SCORER_SOURCE)
    cfg_path = Path(tmp) / "cfg.json"
    cfg_path.write_text(json.dumps({
        "n": 4,
        "input": list(map(float, x.reshape(-1))),
        "weights": list(map(float, weights)),
        "bias": 0.5,
        "baseline": [0.0] * 16,
        "regions": [list(map(int, r)) for r in spec.regions],
    }))

    endpoint = ScorerEndpoint(command=(sys.executable, str(scorer_py), str(cfg_path)))
    with ExternalScorerClient(endpoint) as client:
        print("handshake:", client.handshake)
        remote = ExternalGame(client, "img0")
        local = make_game(x, spec, LinearScorer(weights, bias=0.5))

        masks = rng.integers(0, 16, size=50)
        diff = np.max(np.abs(remote.evaluate_masks(masks) - local.evaluate_masks(masks)))
        print("max |remote - local| over 50 random coalitions:", float(diff))

        print("remote per-order interactions (additive, so ~0):",
              interaction_profile_exact(remote, 0, 3))
