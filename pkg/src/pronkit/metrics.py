"""Evaluation stack: confusion counts, threshold metrics, PR curves and
average-precision AUC, Wilson intervals, severity bands, MUSHRA aggregation.
"""

from __future__ import annotations

import csv
import enum
import json
import statistics
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import LengthMismatchError, PronkitError


class UndefinedMetricError(PronkitError):
    """A metric's denominator is zero."""


class NoPositivesError(PronkitError):
    """A PR curve needs at least one positive label."""


class ScoreOutOfRangeError(PronkitError):
    """A MUSHRA score lies outside the 0-100 scale."""


class AgreementBand(enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(flags: Sequence[int], labels: Sequence[int]) -> ConfusionCounts:
    """Tally the 2x2 table of predicted flags against ground-truth labels."""
    if len(flags) != len(labels):
        raise LengthMismatchError(f"{len(flags)} flags vs {len(labels)} labels")
    tp = fp = tn = fn = 0
    for f, y in zip(flags, labels):
        if f and y:
            tp += 1
        elif f and not y:
            fp += 1
        elif not f and y:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def precision(c: ConfusionCounts) -> float:
    if c.tp + c.fp == 0:
        raise UndefinedMetricError("precision undefined: no raised detections")
    return c.tp / (c.tp + c.fp)


def recall(c: ConfusionCounts) -> float:
    if c.tp + c.fn == 0:
        raise UndefinedMetricError("recall undefined: no positive labels")
    return c.tp / (c.tp + c.fn)


def fpr(c: ConfusionCounts) -> float:
    if c.fp + c.tn == 0:
        raise UndefinedMetricError("fpr undefined: no negative labels")
    return c.fp / (c.fp + c.tn)


def fnr(c: ConfusionCounts) -> float:
    if c.fn + c.tp == 0:
        raise UndefinedMetricError("fnr undefined: no positive labels")
    return c.fn / (c.fn + c.tp)


def f1(c: ConfusionCounts) -> float:
    p = precision(c)
    r = recall(c)
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise UndefinedMetricError("accuracy undefined: nothing scored")
    return (c.tp + c.tn) / c.total


@dataclass(frozen=True)
class PRCurve:
    """(recall, precision, threshold) points with thresholds strictly
    decreasing, hence recall non-decreasing, along the curve."""

    points: tuple[tuple[float, float, float], ...]

    def recalls(self) -> list[float]:
        return [p[0] for p in self.points]

    def precisions(self) -> list[float]:
        return [p[1] for p in self.points]

    def thresholds(self) -> list[float]:
        return [p[2] for p in self.points]


def pr_curve(scores: Sequence[float], labels: Sequence[int]) -> PRCurve:
    """Precision-recall sweep over every distinct score, descending.

    A word is flagged at threshold t when its score >= t; tied scores share
    one threshold.
    """
    if len(scores) != len(labels):
        raise LengthMismatchError(f"{len(scores)} scores vs {len(labels)} labels")
    n_pos = sum(1 for y in labels if y)
    if n_pos == 0:
        raise NoPositivesError("PR curve needs at least one positive label")
    order = np.argsort(np.asarray(scores, dtype=float))[::-1]
    sorted_scores = np.asarray(scores, dtype=float)[order]
    sorted_labels = np.asarray(labels, dtype=int)[order]
    points: list[tuple[float, float, float]] = []
    tp = 0
    flagged = 0
    i = 0
    n = len(sorted_scores)
    while i < n:
        t = sorted_scores[i]
        while i < n and sorted_scores[i] == t:
            tp += int(sorted_labels[i])
            flagged += 1
            i += 1
        points.append((tp / n_pos, tp / flagged, float(t)))
    return PRCurve(tuple(points))


def auc(curve: PRCurve) -> float:
    """Area under the PR curve, average-precision (step) convention.

    Right-continuous steps: sum of precision times the recall increment,
    starting from recall 0.
    """
    if not curve.points:
        raise ValueError("empty PR curve")
    area = 0.0
    prev_recall = 0.0
    for r, p, _ in curve.points:
        area += (r - prev_recall) * p
        prev_recall = r
    return area


def wilson_ci(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("trials must be > 0")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z = statistics.NormalDist().inv_cdf(1 - (1 - confidence) / 2)
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * ((phat * (1 - phat) / trials + z * z / (4 * trials * trials)) ** 0.5) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def severity_band(votes_mispronounced: int, votes_total: int) -> AgreementBand:
    """Inter-annotator-agreement severity band for a mispronounced word.

    Agreement below 40% is LOW, between 40% and 80% inclusive MEDIUM,
    above 80% HIGH. Integer arithmetic keeps the boundaries exact.
    """
    if votes_total <= 0:
        raise ValueError("votes_total must be > 0")
    if not 0 <= votes_mispronounced <= votes_total:
        raise ValueError("votes_mispronounced must lie in [0, votes_total]")
    if 5 * votes_mispronounced < 2 * votes_total:
        return AgreementBand.LOW
    if 5 * votes_mispronounced <= 4 * votes_total:
        return AgreementBand.MEDIUM
    return AgreementBand.HIGH


def mushra_aggregate(
    scores: Mapping[str, Mapping[str, Sequence[float]]],
) -> dict[str, dict[str, float]]:
    """Aggregate MUSHRA listening scores per system.

    ``scores`` maps system -> listener -> list of 0-100 ratings. Returns,
    per system, the pooled mean and median plus a dense rank by median
    (rank 1 = best; equal medians share a rank).
    """
    pooled: dict[str, list[float]] = {}
    for system, listeners in scores.items():
        values: list[float] = []
        for listener, ratings in listeners.items():
            for s in ratings:
                if not 0 <= s <= 100:
                    raise ScoreOutOfRangeError(
                        f"score {s} from listener {listener!r} for system {system!r}"
                    )
                values.append(float(s))
        if not values:
            raise ValueError(f"system {system!r} has no scores")
        pooled[system] = values
    medians = {s: statistics.median(v) for s, v in pooled.items()}
    distinct = sorted(set(medians.values()), reverse=True)
    rank_of = {m: i + 1 for i, m in enumerate(distinct)}
    return {
        system: {
            "mean": statistics.fmean(values),
            "median": medians[system],
            "rank": rank_of[medians[system]],
        }
        for system, values in pooled.items()
    }


def match_prevalence(
    labels: Sequence[int], target: float, rng: np.random.Generator
) -> list[int]:
    """Indices of a subsample whose positive rate is ~``target``.

    Keeps every positive and randomly down-samples negatives, mirroring the
    down-sampling of correctly pronounced words used for cross-band
    comparisons. Returns sorted indices into ``labels``.
    """
    if not 0 < target < 1:
        raise ValueError("target prevalence must lie in (0, 1)")
    pos = [i for i, y in enumerate(labels) if y]
    neg = [i for i, y in enumerate(labels) if not y]
    if not pos:
        raise NoPositivesError("cannot match prevalence without positives")
    want_neg = round(len(pos) * (1 - target) / target)
    if want_neg < len(neg):
        chosen = rng.choice(len(neg), size=want_neg, replace=False)
        neg = [neg[i] for i in sorted(chosen)]
    return sorted(pos + neg)


@dataclass
class EvalReport:
    """Evaluation summary for one detection system on one corpus."""

    system: str
    n_scored: int
    n_positive: int
    auc: float
    anchor_recall: float
    threshold: float
    achieved_recall: float
    precision: float
    precision_ci: tuple[float, float]
    recall_ci: tuple[float, float]
    counts: ConfusionCounts
    curve: PRCurve
    ci_method: str = "wilson"
    severity_breakdown: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        d = {
            "system": self.system,
            "n_scored": self.n_scored,
            "n_positive": self.n_positive,
            "auc": self.auc,
            "anchor_recall": self.anchor_recall,
            "threshold": self.threshold,
            "achieved_recall": self.achieved_recall,
            "precision": self.precision,
            "precision_ci": list(self.precision_ci),
            "recall_ci": list(self.recall_ci),
            "ci_method": self.ci_method,
            "counts": {
                "tp": self.counts.tp,
                "fp": self.counts.fp,
                "tn": self.counts.tn,
                "fn": self.counts.fn,
            },
        }
        if self.severity_breakdown:
            d["severity_breakdown"] = self.severity_breakdown
        return d

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    def write_curve_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["recall", "precision", "threshold"])
            for r, p, t in self.curve.points:
                writer.writerow([f"{r:.10g}", f"{p:.10g}", f"{t:.10g}"])
