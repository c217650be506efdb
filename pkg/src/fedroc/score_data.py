"""Labeled prediction scores: loading, synthetic generation and client partitioning."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterator, NamedTuple, Sequence

import numpy as np

DEFAULT_RANGE = (0.0, 1.0)


class MalformedRowError(ValueError):
    """A CSV row could not be parsed as ``score,label``."""


class OutOfRangeError(ValueError):
    """A score falls outside the declared score range."""


class ScoreRecord(NamedTuple):
    score: float
    label: int


def _check_range(score_range) -> tuple[float, float]:
    lo, hi = float(score_range[0]), float(score_range[1])
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo >= hi:
        raise ValueError(f"invalid score range [{lo}, {hi}]")
    return lo, hi


@dataclass(frozen=True)
class LabeledScores:
    """Scores with binary labels over a closed score range.

    ``labels`` holds 1 for positives and 0 for negatives. Record order is
    preserved everywhere; shards and subsamples keep the relative order of
    the parent dataset.
    """

    scores: np.ndarray
    labels: np.ndarray
    range: tuple[float, float] = DEFAULT_RANGE

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64).reshape(-1)
        labels = np.asarray(self.labels).reshape(-1)
        if scores.shape != labels.shape:
            raise ValueError("scores and labels must have the same length")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")
        lo, hi = _check_range(self.range)
        bad = ~((scores >= lo) & (scores <= hi))
        if bad.any():
            i = int(np.flatnonzero(bad)[0])
            raise OutOfRangeError(f"score {scores[i]!r} at record {i} outside [{lo}, {hi}]")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.int8))
        object.__setattr__(self, "range", (lo, hi))

    def __len__(self) -> int:
        return int(self.scores.size)

    @property
    def n_pos(self) -> int:
        return int(np.count_nonzero(self.labels == 1))

    @property
    def n_neg(self) -> int:
        return int(np.count_nonzero(self.labels == 0))

    @property
    def positives(self) -> np.ndarray:
        return self.scores[self.labels == 1]

    @property
    def negatives(self) -> np.ndarray:
        return self.scores[self.labels == 0]

    def records(self) -> Iterator[ScoreRecord]:
        for s, y in zip(self.scores.tolist(), self.labels.tolist()):
            yield ScoreRecord(s, y)

    def take(self, index) -> "LabeledScores":
        index = np.asarray(index, dtype=np.intp)
        return LabeledScores(self.scores[index], self.labels[index], self.range)

    def require_both_classes(self) -> None:
        if self.n_pos < 1 or self.n_neg < 1:
            raise ValueError(
                f"curve construction needs both classes (n_pos={self.n_pos}, n_neg={self.n_neg})"
            )


def load_csv(path: str | PathLike, score_range=DEFAULT_RANGE) -> LabeledScores:
    """Read a ``score,label`` CSV with 0/1 labels.

    Out-of-range scores raise :class:`OutOfRangeError`; nothing is clamped.
    """
    lo, hi = _check_range(score_range)
    scores: list[float] = []
    labels: list[int] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return LabeledScores(np.empty(0), np.empty(0, dtype=np.int8), (lo, hi))
        if [h.strip().lower() for h in header] != ["score", "label"]:
            raise MalformedRowError(f"row 1: expected header 'score,label', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise MalformedRowError(f"row {lineno}: expected 2 fields, got {len(row)}")
            try:
                s = float(row[0])
                y = int(row[1])
            except ValueError:
                raise MalformedRowError(f"row {lineno}: cannot parse {row!r}") from None
            if y not in (0, 1):
                raise MalformedRowError(f"row {lineno}: label must be 0 or 1, got {y}")
            if not (lo <= s <= hi):
                raise OutOfRangeError(f"row {lineno}: score {s} outside [{lo}, {hi}]")
            scores.append(s)
            labels.append(y)
    return LabeledScores(np.array(scores, dtype=np.float64), np.array(labels, dtype=np.int8), (lo, hi))


def save_csv(data: LabeledScores, path: str | PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["score", "label"])
        for s, y in zip(data.scores.tolist(), data.labels.tolist()):
            writer.writerow([repr(s), y])


@dataclass(frozen=True)
class SyntheticSpec:
    """Beta-distributed class-conditional scores mapped onto ``range``.

    Beta densities with both shape parameters >= 1 are bounded, so the
    resulting class CDFs are Lipschitz.
    """

    pos_dist: tuple[float, float] = (5.0, 2.0)
    neg_dist: tuple[float, float] = (2.0, 5.0)
    n_pos: int = 10_000
    n_neg: int = 10_000
    seed: int = 0
    range: tuple[float, float] = DEFAULT_RANGE


def generate(spec: SyntheticSpec) -> LabeledScores:
    if spec.n_pos < 0 or spec.n_neg < 0:
        raise ValueError("class counts must be non-negative")
    if min(*spec.pos_dist, *spec.neg_dist) <= 0:
        raise ValueError("Beta shape parameters must be positive")
    lo, hi = _check_range(spec.range)
    rng = np.random.default_rng(spec.seed)
    pos = rng.beta(*spec.pos_dist, size=spec.n_pos)
    neg = rng.beta(*spec.neg_dist, size=spec.n_neg)
    unit = np.concatenate([pos, neg])
    labels = np.concatenate([np.ones(spec.n_pos, np.int8), np.zeros(spec.n_neg, np.int8)])
    order = rng.permutation(unit.size)
    scores = lo + (hi - lo) * unit[order]
    # lo + (hi-lo)*u can round past hi for u just below 1
    np.clip(scores, lo, hi, out=scores)
    return LabeledScores(scores, labels[order], (lo, hi))


@dataclass(frozen=True)
class PartitionSpec:
    """How records are spread over simulated clients.

    ``strategy`` is ``"iid"``, ``"label-skew"`` (with ``skew`` in [0, 1]) or
    ``"explicit"`` (with ``assignment``: one sequence of record indices per
    client).
    """

    strategy: str = "iid"
    client_count: int = 10
    seed: int = 0
    skew: float = 1.0
    assignment: Sequence[Sequence[int]] | None = field(default=None, compare=False)


def partition(data: LabeledScores, spec: PartitionSpec) -> list[LabeledScores]:
    m = spec.client_count
    if m < 1:
        raise ValueError("client_count must be >= 1")
    n = len(data)

    if spec.strategy == "explicit":
        if spec.assignment is None or len(spec.assignment) != m:
            raise ValueError("explicit partition needs one index list per client")
        seen = np.zeros(n, dtype=bool)
        shards = []
        for client, idx in enumerate(spec.assignment):
            idx = np.asarray(idx, dtype=np.intp).reshape(-1)
            if idx.size and (idx.min() < 0 or idx.max() >= n):
                bad = idx[(idx < 0) | (idx >= n)][0]
                raise IndexError(f"client {client} references missing record {int(bad)}")
            if seen[idx].any() or np.unique(idx).size != idx.size:
                raise ValueError(f"client {client} repeats an already assigned record")
            seen[idx] = True
            shards.append(data.take(np.sort(idx)))
        if not seen.all():
            raise ValueError(f"{int((~seen).sum())} records are not assigned to any client")
        return shards

    if m == 1:
        return [data]

    rng = np.random.default_rng(spec.seed)
    if spec.strategy == "iid":
        order = rng.permutation(n)
    elif spec.strategy == "label-skew":
        if not 0.0 <= spec.skew <= 1.0:
            raise ValueError("skew must be in [0, 1]")
        # skew=1: positives first then negatives; skew=0: uniform random order
        key = spec.skew * (1 - data.labels) + (1.0 - spec.skew) * rng.random(n)
        order = np.lexsort((rng.random(n), key))
    else:
        raise ValueError(f"unknown partition strategy {spec.strategy!r}")
    return [data.take(np.sort(chunk)) for chunk in np.array_split(order, m)]


def subsample_ratio(data: LabeledScores, r: float, seed: int = 0) -> LabeledScores:
    """Keep every negative, draw ``floor(r * n_neg)`` positives without replacement."""
    n_pos, n_neg = data.n_pos, data.n_neg
    if n_neg == 0:
        raise ValueError("no negatives to anchor the ratio")
    if not r > 0:
        raise ValueError("target ratio must be positive")
    current = n_pos / n_neg
    if r > current * (1 + 1e-12):
        raise ValueError(f"target ratio {r} exceeds current ratio {current:.6g}")
    target = min(n_pos, int(math.floor(r * n_neg + 1e-9)))
    pos_idx = np.flatnonzero(data.labels == 1)
    rng = np.random.default_rng(seed)
    kept = rng.choice(pos_idx, size=target, replace=False)
    keep = np.sort(np.concatenate([kept, np.flatnonzero(data.labels == 0)]))
    return data.take(keep)
