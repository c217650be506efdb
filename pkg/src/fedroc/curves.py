"""ROC and PR curves: estimates from quantile ECDFs and exact centralized sweeps."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .interpolation import MonotoneInterpolant, fit
from .quantile_est import QuantileProfile
from .score_data import LabeledScores

DEFAULT_GRID_DENSITY = 2048


@dataclass(frozen=True)
class Ecdf:
    """Cumulative probability of scores, interpolated between quantile knots.

    Zero strictly below the first knot, clamped to the last knot value above
    the span.
    """

    interpolant: MonotoneInterpolant
    tag: str = "all"

    @property
    def knots(self) -> np.ndarray:
        return self.interpolant.x

    def __call__(self, s):
        s_arr = np.asarray(s, dtype=np.float64)
        out = np.where(s_arr < self.knots[0], 0.0, self.interpolant(s_arr))
        out = np.clip(out, 0.0, 1.0)
        return float(out) if np.ndim(s) == 0 else out


def build_ecdf(profile: QuantileProfile, method: str = "pchip", tag: str = "all") -> Ecdf:
    return Ecdf(fit(profile.values, profile.levels, method), tag)


class MixtureEcdf:
    """Count-weighted mixture of class ECDFs, i.e. the ECDF of all scores."""

    def __init__(self, ecdf_pos, ecdf_neg, n_pos: float, n_neg: float):
        self.parts = (ecdf_pos, ecdf_neg)
        self.weights = (n_pos / (n_pos + n_neg), n_neg / (n_pos + n_neg))

    def __call__(self, s):
        (fp, fn), (wp, wn) = self.parts, self.weights
        return wp * np.asarray(fp(s)) + wn * np.asarray(fn(s))


@dataclass
class CurveEstimate:
    """Ordered curve points plus provenance.

    ``step`` marks right-end-constant semantics (exact PR curves); all other
    curves are read with linear interpolation between points.
    """

    kind: str
    x: np.ndarray
    y: np.ndarray
    step: bool = False
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return int(self.x.size)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for key in sorted(self.meta):
            buf.write(f"# {key}={self.meta[key]}\n")
        buf.write(f"# step={int(self.step)}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y"])
        for a, b in zip(self.x.tolist(), self.y.tolist()):
            writer.writerow([repr(a), repr(b)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": self.kind,
                "step": self.step,
                "meta": self.meta,
                "x": self.x.tolist(),
                "y": self.y.tolist(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "CurveEstimate":
        obj = json.loads(text)
        return cls(obj["kind"], np.asarray(obj["x"], float), np.asarray(obj["y"], float), obj["step"], obj["meta"])


def fpr_tpr(ecdf_neg: Callable, ecdf_pos: Callable, s):
    f = np.clip(1.0 - np.asarray(ecdf_neg(s)), 0.0, 1.0)
    t = np.clip(1.0 - np.asarray(ecdf_pos(s)), 0.0, 1.0)
    if np.ndim(s) == 0:
        return float(f), float(t)
    return f, t


def precision(t, f, n_pos: float, n_neg: float):
    """TP / (TP + FP) from rates and class counts; 1 where both rates are 0."""
    t = np.asarray(t, dtype=np.float64)
    f = np.asarray(f, dtype=np.float64)
    num = t * n_pos
    den = num + f * n_neg
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(den > 0, num / den, 1.0)
    return float(p) if p.ndim == 0 else p


def threshold_grid(score_range, *profiles: QuantileProfile, density: int = DEFAULT_GRID_DENSITY) -> np.ndarray:
    """Descending thresholds: uniform grid, range ends and every quantile value."""
    lo, hi = score_range
    parts = [np.linspace(lo, hi, max(density, 2))]
    parts += [p.values for p in profiles]
    return np.unique(np.concatenate(parts))[::-1]


def roc_estimate(ecdf_neg, ecdf_pos, grid, meta=None) -> CurveEstimate:
    f, t = fpr_tpr(ecdf_neg, ecdf_pos, np.asarray(grid))
    order = np.lexsort((t, f))
    f, t = f[order], t[order]
    x = np.r_[0.0, f, 1.0]
    y = np.maximum.accumulate(np.r_[0.0, t, 1.0])
    return CurveEstimate("ROC", x, y, meta=dict(meta or {}))


def _pr_points(t, p, meta, clip_events: int) -> CurveEstimate:
    order = np.argsort(t, kind="stable")
    m = dict(meta or {})
    m["clip_events"] = int(clip_events)
    return CurveEstimate("PR", t[order], p[order], meta=m)


def pr_estimate_separate(ecdf_neg, ecdf_pos, n_pos: float, n_neg: float, grid, meta=None) -> CurveEstimate:
    """Precision from per-class ECDFs; cannot exceed 1, so nothing is clipped."""
    grid = np.asarray(grid)
    f, t = fpr_tpr(ecdf_neg, ecdf_pos, grid)
    p = precision(t, f, n_pos, n_neg)
    clip_events = int(np.count_nonzero(p > 1.0))
    return _pr_points(t, p, meta, clip_events)


def pr_estimate_combine(ecdf_all, ecdf_pos, n_all: float, n_pos: float, grid, meta=None) -> CurveEstimate:
    """Precision with the denominator taken from the all-scores ECDF.

    Values above 1 are clipped; ``meta["clip_events"]`` counts them.
    """
    grid = np.asarray(grid)
    t = np.clip(1.0 - np.asarray(ecdf_pos(grid)), 0.0, 1.0)
    den = np.clip(1.0 - np.asarray(ecdf_all(grid)), 0.0, 1.0) * n_all
    num = t * n_pos
    with np.errstate(divide="ignore", invalid="ignore"):
        raw = np.where(den > 0, num / den, np.where(num > 0, np.inf, 1.0))
    clipped = raw > 1.0
    return _pr_points(t, np.minimum(raw, 1.0), meta, int(np.count_nonzero(clipped)))


def _sweep(data: LabeledScores):
    data.require_both_classes()
    order = np.argsort(-data.scores, kind="stable")
    s = data.scores[order]
    y = data.labels[order].astype(np.int64)
    tp = np.cumsum(y)
    fp = np.cumsum(1 - y)
    # one threshold per distinct score: keep the last record of each tie run
    last = np.r_[s[1:] != s[:-1], True]
    return tp[last], fp[last], s[last]


def exact_roc(data: LabeledScores) -> CurveEstimate:
    tp, fp, _ = _sweep(data)
    x = np.r_[0.0, fp / data.n_neg]
    y = np.r_[0.0, tp / data.n_pos]
    return CurveEstimate("ROC", x, y, meta={"mode": "exact"})


def exact_pr(data: LabeledScores) -> CurveEstimate:
    tp, fp, _ = _sweep(data)
    x = np.r_[0.0, tp / data.n_pos]
    y = np.r_[1.0, tp / (tp + fp)]
    return CurveEstimate("PR", x, y, step=True, meta={"mode": "exact"})


def exact_rates(data: LabeledScores):
    """Exact ``(F(s), T(s))`` as functions of the threshold ``s``."""
    neg = np.sort(data.negatives)
    pos = np.sort(data.positives)

    def fpr(s):
        return 1.0 - np.searchsorted(neg, s, side="right") / neg.size

    def tpr(s):
        return 1.0 - np.searchsorted(pos, s, side="right") / pos.size

    return fpr, tpr
