"""Correlation and calibration metrics used by the proxy analysis."""

from __future__ import annotations

import math

import numpy as np

from .errors import ConstantInput, ShapeMismatch


def pearson(x, y) -> float:
    """Pearson correlation coefficient.

    Computed from centered sums as s_xy / (sqrt(s_xx) * sqrt(s_yy)) so
    exactly affine integer data yields exactly +/-1. Raises ConstantInput
    when either vector has zero variance (r undefined).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeMismatch(f"need equal-length 1-d vectors, got {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ConstantInput("correlation needs at least two points")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    if sxx == 0.0 or syy == 0.0:
        raise ConstantInput("constant vector: correlation undefined")
    denom = math.sqrt(sxx * syy)  # single sqrt keeps affine data at exactly +/-1
    if math.isinf(denom):
        denom = math.sqrt(sxx) * math.sqrt(syy)
    r = float(np.dot(xc, yc)) / denom
    return max(-1.0, min(1.0, r))


def rms_calibration_error(confidence, accuracy, weights=None) -> float:
    """Root-mean-square calibration error over confidence bins.

    `confidence` holds each bin's stated confidence c, `accuracy` the
    empirical accuracy within the bin, `weights` optional bin masses
    (sample counts). Perfectly calibrated bins give exactly 0.
    """
    c = np.asarray(confidence, dtype=np.float64)
    a = np.asarray(accuracy, dtype=np.float64)
    if c.shape != a.shape or c.ndim != 1 or c.size == 0:
        raise ShapeMismatch(f"need equal-length non-empty vectors, got {c.shape} vs {a.shape}")
    if weights is None:
        w = np.full(c.shape, 1.0 / c.size)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != c.shape:
            raise ShapeMismatch("weights shape must match bins")
        if np.any(w < 0) or w.sum() == 0:
            raise ValueError("weights must be nonnegative with positive total")
        w = w / w.sum()
    return math.sqrt(float(np.dot(w, (a - c) ** 2)))
