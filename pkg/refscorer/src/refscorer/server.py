"""Reference external scorer for the line-delimited scoring protocol.

Serves masked-input scores over stdin/stdout: the first line out is a
handshake {"protocol": 1, "n": ..., "input_ids": [...]}, then each
request line {"id", "input_id", "mask", "class"} gets exactly one
response line, either {"id", "score"} or {"id", "error"}. Masks are
'0'/'1' strings with player 0 as the first character. The session runs
until stdin closes.

Masking is implemented here from the protocol's written semantics, on
purpose without importing the client package: an index keeps its input
value when its owning player's mask character is '1' and takes the
baseline value otherwise. Cross-implementation agreement therefore
validates the written semantics, not shared code.

Fixture file (JSON):
    {
      "n": <players>,
      "regions": [[flat indices of player 0], ...],
      "baseline": [flat values],
      "inputs": {"<input_id>": [flat values], ...},
      "scorers": {
        "linear":  {"weights": [...], "bias": <float>},
        "product": {"idx_a": [...], "idx_b": [...]}
      }
    }
"""

from __future__ import annotations

import argparse
import json
import math
import sys

PROTOCOL_VERSION = 1


class ScorerAdapter:
    """Scoring hook: subclass and implement score() to serve a real
    model (load weights in __init__, run inference in score)."""

    def score(self, masked: list[float], class_index: int) -> float:
        raise NotImplementedError


class LinearAdapter(ScorerAdapter):
    def __init__(self, weights: list[float], bias: float = 0.0):
        self.weights = [float(w) for w in weights]
        self.bias = float(bias)

    def score(self, masked, class_index):
        return sum(w * v for w, v in zip(self.weights, masked)) + self.bias


class ProductAdapter(ScorerAdapter):
    def __init__(self, idx_a: list[int], idx_b: list[int]):
        self.idx_a = [int(i) for i in idx_a]
        self.idx_b = [int(i) for i in idx_b]

    def score(self, masked, class_index):
        a = sum(masked[i] for i in self.idx_a)
        b = sum(masked[i] for i in self.idx_b)
        return a * b


def build_adapter(kind: str, fixtures: dict) -> ScorerAdapter:
    params = fixtures.get("scorers", {}).get(kind)
    if params is None:
        raise ValueError(f"fixture defines no scorer {kind!r}")
    if kind == "linear":
        return LinearAdapter(params["weights"], params.get("bias", 0.0))
    if kind == "product":
        return ProductAdapter(params["idx_a"], params["idx_b"])
    raise ValueError(f"unknown scorer kind {kind!r}")


class ScorerSession:
    """One protocol session: registered inputs, a scorer, and the
    request loop. Every request line gets exactly one response."""

    def __init__(self, fixtures: dict, adapter: ScorerAdapter):
        self.n = int(fixtures["n"])
        self.baseline = [float(v) for v in fixtures["baseline"]]
        self.inputs = {
            str(k): [float(v) for v in vals]
            for k, vals in fixtures["inputs"].items()
        }
        regions = fixtures["regions"]
        if len(regions) != self.n:
            raise ValueError(f"fixture has {len(regions)} regions for n={self.n}")
        size = len(self.baseline)
        self.owner = [-1] * size
        for player, region in enumerate(regions):
            for idx in region:
                if self.owner[idx] != -1:
                    raise ValueError(f"index {idx} assigned to two players")
                self.owner[idx] = player
        if any(p == -1 for p in self.owner):
            raise ValueError("regions do not cover every index")
        for input_id, vals in self.inputs.items():
            if len(vals) != size:
                raise ValueError(f"input {input_id!r} length != baseline length")
        self.adapter = adapter

    def handshake(self) -> dict:
        return {
            "protocol": PROTOCOL_VERSION,
            "n": self.n,
            "input_ids": sorted(self.inputs),
        }

    def apply_mask(self, input_id: str, mask: str) -> list[float]:
        x = self.inputs[input_id]
        return [
            x[idx] if mask[self.owner[idx]] == "1" else self.baseline[idx]
            for idx in range(len(x))
        ]

    def handle(self, line: str) -> dict:
        """Response object for one request line; never raises."""
        rid = None
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                return {"id": None, "error": "request is not an object"}
            rid = request.get("id")
            input_id = request.get("input_id")
            mask = request.get("mask")
            class_index = int(request.get("class", 0))
            if input_id not in self.inputs:
                return {"id": rid, "error": f"unknown input_id {input_id!r}"}
            if (not isinstance(mask, str) or len(mask) != self.n
                    or set(mask) - {"0", "1"}):
                return {"id": rid, "error": f"bad mask for n={self.n}"}
            score = float(self.adapter.score(self.apply_mask(input_id, mask),
                                             class_index))
            if not math.isfinite(score):
                return {"id": rid, "error": "scorer produced a non-finite value"}
            return {"id": rid, "score": score}
        except Exception as exc:  # malformed request: keep the session alive
            return {"id": rid, "error": f"{type(exc).__name__}: {exc}"}

    def serve(self, stdin=None, stdout=None) -> int:
        stdin = stdin or sys.stdin
        stdout = stdout or sys.stdout
        stdout.write(json.dumps(self.handshake()) + "\n")
        stdout.flush()
        for line in stdin:
            if not line.strip():
                continue
            stdout.write(json.dumps(self.handle(line)) + "\n")
            stdout.flush()
        return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="refscorer",
        description="Reference external scorer: speaks the line-delimited "
                    "scoring protocol over stdin/stdout until EOF.",
    )
    parser.add_argument("--fixtures", required=True,
                        help="JSON fixture file with inputs, regions, baseline")
    parser.add_argument("--scorer", default="linear",
                        help="scorer kind from the fixture (default: linear)")
    args = parser.parse_args(argv)
    try:
        fixtures = json.loads(open(args.fixtures).read())
        session = ScorerSession(fixtures, build_adapter(args.scorer, fixtures))
    except (OSError, ValueError, KeyError) as exc:
        print(f"refscorer: {exc}", file=sys.stderr)
        return 2
    return session.serve()


if __name__ == "__main__":
    sys.exit(main())
