"""Bridge from concrete inputs and scorers to game functions.

Players are disjoint index regions of an input array. A coalition keeps
the input values inside its members' regions and writes baseline values
everywhere else; the score of the masked input is the coalition's value.
Scorers are either in-process callables or an external child process
speaking a line-delimited JSON protocol (one request or response object
per line over stdin/stdout; masks travel as '0'/'1' strings with player
0 first, pixels stay on the scorer side).
"""

from __future__ import annotations

import json
import math
import subprocess
import threading
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadGrid,
    ProtocolViolation,
    ScorerTimeout,
    ScorerUnavailable,
    ShapeMismatch,
)
from .games import Coalition, Game, GameSpec

PROTOCOL_VERSION = 1


@dataclass(frozen=True)
class MaskSpec:
    """Partition of an input into n player regions plus baseline values.

    `regions` holds flat index arrays; they must be pairwise disjoint and
    cover every index exactly once. `baseline` has the input's shape.
    """

    input_shape: tuple[int, ...]
    regions: tuple[np.ndarray, ...]
    baseline: np.ndarray

    def __post_init__(self):
        size = int(np.prod(self.input_shape))
        if self.baseline.shape != tuple(self.input_shape):
            raise ShapeMismatch(
                f"baseline shape {self.baseline.shape} != input shape {self.input_shape}"
            )
        counts = np.zeros(size, dtype=np.int64)
        for region in self.regions:
            if region.size == 0:
                raise BadGrid("empty player region")
            counts[region] += 1
        if counts.min() != 1 or counts.max() != 1:
            raise BadGrid("regions must cover every index exactly once")

    @property
    def n(self) -> int:
        return len(self.regions)

    @classmethod
    def grid(cls, input_shape, rows: int, cols: int,
             baseline=None) -> "MaskSpec":
        regions = partition_grid(input_shape, rows, cols)
        if baseline is None:
            baseline_arr = np.zeros(input_shape, dtype=np.float64)
        else:
            baseline_arr = np.asarray(baseline, dtype=np.float64)
            if baseline_arr.ndim == 0:
                baseline_arr = np.full(input_shape, float(baseline_arr))
        return cls(tuple(input_shape), tuple(regions), baseline_arr)


def _axis_slices(extent: int, parts: int) -> list[slice]:
    """Split an axis into `parts` runs; the last run absorbs the remainder."""
    base = extent // parts
    if base == 0:
        raise BadGrid(f"axis of {extent} cannot be split into {parts} parts")
    bounds = [k * base for k in range(parts)] + [extent]
    return [slice(bounds[k], bounds[k + 1]) for k in range(parts)]


def partition_grid(input_shape, rows: int, cols: int) -> list[np.ndarray]:
    """Rectangular patches tiling the first two (spatial) axes.

    Produces rows*cols regions of flat indices; any trailing axes
    (channels) follow their pixel. Non-divisible extents push the
    remainder into the last patch of the axis. Row-major region order:
    player 0 is the top-left patch.
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise BadGrid(f"grid {rows}x{cols} needs at least 2 patches")
    shape = tuple(input_shape)
    if len(shape) < 2:
        raise BadGrid(f"grid partition needs a 2-d (or more) input, got {shape}")
    h, w = shape[0], shape[1]
    flat = np.arange(int(np.prod(shape)), dtype=np.int64).reshape(shape)
    regions = []
    for rs in _axis_slices(h, rows):
        for cs in _axis_slices(w, cols):
            regions.append(flat[rs, cs].ravel())
    return regions


def apply_mask(x: np.ndarray, coalition: Coalition, spec: MaskSpec) -> np.ndarray:
    """Masked copy of x: members' regions keep x, the rest take the
    baseline. Full coalition returns x bit-exactly; masking twice with
    the same coalition is a no-op."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != tuple(spec.input_shape):
        raise ShapeMismatch(f"input shape {x.shape} != spec shape {spec.input_shape}")
    if coalition.n != spec.n:
        raise ShapeMismatch(f"coalition has {coalition.n} players, spec has {spec.n}")
    out = spec.baseline.copy().reshape(-1)
    flat = x.reshape(-1)
    for player in coalition.members():
        idx = spec.regions[player]
        out[idx] = flat[idx]
    return out.reshape(x.shape)


def mixup_input(x0, x1, cfg) -> np.ndarray:
    """Convex blend of two equally shaped inputs: lam*x0 + (1-lam)*x1.
    Accepts a MixConfig or a bare lambda."""
    lam = float(getattr(cfg, "lam", cfg))
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    x0 = np.asarray(x0, dtype=np.float64)
    x1 = np.asarray(x1, dtype=np.float64)
    if x0.shape != x1.shape:
        raise ShapeMismatch(f"shapes differ: {x0.shape} vs {x1.shape}")
    if lam == 1.0:
        return x0.copy()
    if lam == 0.0:
        return x1.copy()
    return lam * x0 + (1.0 - lam) * x1


class LinearScorer:
    """score(x) = sum(w * x) + bias. Induces an additive game under a
    zero baseline."""

    def __init__(self, weights, bias: float = 0.0):
        self.weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        self.bias = float(bias)

    def __call__(self, x: np.ndarray) -> float:
        return float(np.dot(self.weights, np.asarray(x, np.float64).reshape(-1)) + self.bias)


class ProductScorer:
    """score(x) = (sum of x over one index set) * (sum over another).
    With a zero baseline and index sets matching two player regions the
    induced game is a scaled AND of those two players."""

    def __init__(self, idx_a, idx_b):
        self.idx_a = np.asarray(idx_a, dtype=np.int64)
        self.idx_b = np.asarray(idx_b, dtype=np.int64)

    def __call__(self, x: np.ndarray) -> float:
        flat = np.asarray(x, np.float64).reshape(-1)
        return float(flat[self.idx_a].sum() * flat[self.idx_b].sum())


class MaskedScorerGame(Game):
    """Game induced by (input, mask spec, in-process scorer)."""

    def __init__(self, x, spec: MaskSpec, scorer):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != tuple(spec.input_shape):
            raise ShapeMismatch(f"input shape {x.shape} != spec shape {spec.input_shape}")
        super().__init__(GameSpec(n=spec.n))
        self.x = x
        self.mask_spec = spec
        self.scorer = scorer

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        out = np.empty(len(masks), dtype=np.float64)
        for idx, mask in enumerate(np.asarray(masks, dtype=np.int64)):
            coalition = Coalition(self.n, int(mask))
            out[idx] = self.scorer(apply_mask(self.x, coalition, self.mask_spec))
        return out


def make_game(x, spec: MaskSpec, scorer) -> MaskedScorerGame:
    """Wrap an input, a mask spec, and a scorer into a game whose value
    on the full coalition is the scorer's score on the raw input."""
    return MaskedScorerGame(x, spec, scorer)


@dataclass(frozen=True)
class ScorerEndpoint:
    """How to reach an external scorer: the child-process command line,
    the largest request batch kept in flight, and the per-batch timeout."""

    command: tuple[str, ...]
    batch_limit: int = 256
    timeout: float = 30.0

    def __post_init__(self):
        if self.batch_limit < 1:
            raise ValueError("batch_limit must be >= 1")
        if not self.command:
            raise ValueError("empty scorer command")


@dataclass
class Handshake:
    protocol: int
    n: int
    input_ids: list[str]


class ExternalScorerClient:
    """Line-protocol client for an external scorer child process.

    Requests: {"id": int, "input_id": str, "mask": "0101...", "class": int}
    Responses: {"id": int, "score": float} or {"id": int, "error": str},
    in any order; ids match them back. Non-finite scores are protocol
    violations. The first line from the scorer is the handshake.
    """

    def __init__(self, endpoint: ScorerEndpoint):
        self.endpoint = endpoint
        self._lock = threading.Lock()
        self._next_id = 0
        try:
            self._proc = subprocess.Popen(
                list(endpoint.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise ScorerUnavailable(f"cannot start scorer: {exc}") from exc
        self.handshake = self._read_handshake()

    def _read_line(self) -> str:
        if self._proc.stdout is None:
            raise ScorerUnavailable("scorer stdout closed")
        line = self._proc.stdout.readline()
        if line == "":
            raise ScorerUnavailable("scorer exited or closed its stdout")
        return line

    def _read_handshake(self) -> Handshake:
        try:
            obj = json.loads(self._read_line())
        except json.JSONDecodeError as exc:
            raise ProtocolViolation(f"handshake is not JSON: {exc}") from exc
        for key in ("protocol", "n", "input_ids"):
            if key not in obj:
                raise ProtocolViolation(f"handshake missing {key!r}: {obj}")
        if obj["protocol"] != PROTOCOL_VERSION:
            raise ProtocolViolation(f"unsupported protocol {obj['protocol']}")
        return Handshake(
            protocol=int(obj["protocol"]),
            n=int(obj["n"]),
            input_ids=[str(s) for s in obj["input_ids"]],
        )

    def close(self) -> None:
        if self._proc.stdin is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def score_batch(self, input_id: str, masks: list[str], class_index: int) -> np.ndarray:
        """Scores for a batch of mask strings, one request per mask,
        chunked to the endpoint's batch limit."""
        out = np.empty(len(masks), dtype=np.float64)
        step = self.endpoint.batch_limit
        for start in range(0, len(masks), step):
            chunk = masks[start:start + step]
            out[start:start + len(chunk)] = self._roundtrip(input_id, chunk, class_index)
        return out

    def _roundtrip(self, input_id: str, masks: list[str], class_index: int) -> np.ndarray:
        with self._lock:
            ids = list(range(self._next_id, self._next_id + len(masks)))
            self._next_id += len(masks)
            if self._proc.stdin is None:
                raise ScorerUnavailable("scorer stdin closed")
            timer = threading.Timer(self.endpoint.timeout, self._proc.kill)
            timer.start()
            try:
                for rid, mask in zip(ids, masks):
                    request = {
                        "id": rid,
                        "input_id": input_id,
                        "mask": mask,
                        "class": class_index,
                    }
                    try:
                        self._proc.stdin.write(json.dumps(request) + "\n")
                    except (BrokenPipeError, OSError) as exc:
                        raise ScorerUnavailable(f"scorer pipe broke: {exc}") from exc
                try:
                    self._proc.stdin.flush()
                except (BrokenPipeError, OSError) as exc:
                    raise ScorerUnavailable(f"scorer pipe broke: {exc}") from exc

                pending = dict.fromkeys(ids)
                remaining = len(ids)
                while remaining:
                    try:
                        line = self._read_line()
                    except ScorerUnavailable:
                        if not timer.is_alive():
                            raise ScorerTimeout(
                                f"no response within {self.endpoint.timeout}s"
                            ) from None
                        raise
                    try:
                        obj = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise ProtocolViolation(f"response is not JSON: {line!r}") from exc
                    rid = obj.get("id")
                    if rid not in pending or pending[rid] is not None:
                        raise ProtocolViolation(f"unexpected or duplicate id: {obj}")
                    if "error" in obj:
                        raise ProtocolViolation(f"scorer error for id {rid}: {obj['error']}")
                    if "score" not in obj:
                        raise ProtocolViolation(f"response missing score: {obj}")
                    score = float(obj["score"])
                    if not math.isfinite(score):
                        raise ProtocolViolation(f"non-finite score for id {rid}: {score}")
                    pending[rid] = score
                    remaining -= 1
            finally:
                timer.cancel()
        return np.array([pending[rid] for rid in ids], dtype=np.float64)


class ExternalGame(Game):
    """Game evaluated by an external scorer for one of its input ids."""

    def __init__(self, client: ExternalScorerClient, input_id: str,
                 class_index: int = 0):
        if input_id not in client.handshake.input_ids:
            raise ProtocolViolation(
                f"scorer does not know input {input_id!r}; "
                f"it offers {client.handshake.input_ids}"
            )
        super().__init__(GameSpec(n=client.handshake.n))
        self.client = client
        self.input_id = input_id
        self.class_index = class_index

    def evaluate_masks(self, masks: np.ndarray) -> np.ndarray:
        strings = [
            Coalition(self.n, int(mask)).mask_string()
            for mask in np.asarray(masks, dtype=np.int64)
        ]
        return self.client.score_batch(self.input_id, strings, self.class_index)
