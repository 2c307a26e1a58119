"""Toy-scale lexical-stress pipeline.

Scaled dot-product attention, neighbor-ratio prominence features, a
heuristic per-syllable stress scorer, and the stress-error decision rule.
Syllable features arrive as one row per vowel nucleus: z-scored mean F0,
z-scored mean intensity, nucleus duration in seconds.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import LengthMismatchError, PronkitError, ShapeMismatchError
from .phonemes import StressPattern

F0_COL, INTENSITY_COL, DURATION_COL = 0, 1, 2


class NonPositiveDurationError(PronkitError):
    """Syllable nucleus durations must be strictly positive."""


def _ordered_sum(values: np.ndarray, axis: int) -> np.ndarray:
    # Sum in a canonical (sorted) order so that reordering key/value rows
    # cannot change results even in the last float ulp.
    return np.sum(np.sort(values, axis=axis), axis=axis)


def attention(
    query: np.ndarray, keys: np.ndarray, values: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Scaled dot-product attention.

    Weights are the row-softmax of query-key dot products scaled by the
    square root of the key dimension; the output is the weight-average of
    the value rows. Returns (output, weights).
    """
    q = np.atleast_2d(np.asarray(query, dtype=float))
    k = np.atleast_2d(np.asarray(keys, dtype=float))
    v = np.atleast_2d(np.asarray(values, dtype=float))
    if q.shape[1] != k.shape[1]:
        raise ShapeMismatchError(f"query dim {q.shape[1]} vs key dim {k.shape[1]}")
    if k.shape[0] != v.shape[0]:
        raise ShapeMismatchError(f"{k.shape[0]} keys vs {v.shape[0]} value rows")
    if k.shape[0] == 0 or k.shape[1] == 0:
        raise ShapeMismatchError("keys must be a non-empty matrix")

    # explicit broadcast-and-reduce keeps each logit's rounding independent
    # of where its key row sits, so key order can never leak into results
    logits = (q[:, None, :] * k[None, :, :]).sum(axis=2) / np.sqrt(k.shape[1])
    shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
    weights = shifted / _ordered_sum(shifted, axis=1)[:, None]
    # output[i, d] = sum_k weights[i, k] * v[k, d], summed in canonical order
    products = weights[:, :, None] * v[None, :, :]
    output = _ordered_sum(products, axis=1)
    return output, weights


def differential_ratios(features: np.ndarray) -> np.ndarray:
    """Relative-prominence ratios of each syllable against its neighbors.

    For each of the three features, the ratio of the syllable's value to
    its left and right neighbor (1.0 where the neighbor is missing), giving
    a K x 6 matrix ordered [f0_l, f0_r, int_l, int_r, dur_l, dur_r].
    Z-scored F0/intensity are shifted by +3 (clamped at 0.1) first so the
    ratios stay defined on negative z-scores; durations must be positive.
    """
    f = np.asarray(features, dtype=float)
    if f.ndim != 2 or f.shape[1] != 3:
        raise ShapeMismatchError(f"expected a K x 3 feature matrix, got {f.shape}")
    if np.any(f[:, DURATION_COL] <= 0):
        raise NonPositiveDurationError("nucleus durations must be > 0")
    shifted = f.copy()
    shifted[:, F0_COL] = np.maximum(shifted[:, F0_COL] + 3.0, 0.1)
    shifted[:, INTENSITY_COL] = np.maximum(shifted[:, INTENSITY_COL] + 3.0, 0.1)

    k = f.shape[0]
    out = np.ones((k, 6), dtype=float)
    for col in (F0_COL, INTENSITY_COL, DURATION_COL):
        x = shifted[:, col]
        if k > 1:
            out[1:, 2 * col] = x[1:] / x[:-1]  # vs left neighbor
            out[:-1, 2 * col + 1] = x[:-1] / x[1:]  # vs right neighbor
    return out


def heuristic_stress_probs(features: np.ndarray) -> np.ndarray:
    """Per-syllable probability of carrying the word's stress.

    Stand-in for a trained classifier: stressed syllables tend to be
    longer, louder and higher pitched, so each syllable is scored by the
    within-word z-sum of the three cues and squashed with a softmax.
    Constant cues give a uniform distribution; K=1 gives probability 1.
    """
    f = np.asarray(features, dtype=float)
    if f.ndim != 2 or f.shape[1] != 3:
        raise ShapeMismatchError(f"expected a K x 3 feature matrix, got {f.shape}")
    if f.shape[0] == 0:
        raise ShapeMismatchError("need at least one syllable")
    std = f.std(axis=0)
    std[std == 0] = 1.0
    z = (f - f.mean(axis=0)) / std
    score = z.sum(axis=1)
    shifted = np.exp(score - score.max())
    return shifted / shifted.sum()


def detect_stress_errors(
    canonical: StressPattern, probs: np.ndarray, threshold: float
) -> tuple[int, ...]:
    """Flag syllables whose estimated stress contradicts the canonical one.

    The estimate places stress on the argmax-probability syllable. A
    syllable is flagged only when its estimated flag differs from the
    canonical flag and the probability of the estimated class exceeds the
    threshold.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or len(p) != len(canonical):
        raise LengthMismatchError(f"{len(canonical)} syllables vs {p.shape} probabilities")
    stressed = int(np.argmax(p))
    flags = []
    for i, canonical_flag in enumerate(canonical):
        estimated_flag = i == stressed
        class_prob = p[i] if estimated_flag else 1.0 - p[i]
        flags.append(int(estimated_flag != canonical_flag and class_prob > threshold))
    return tuple(flags)


def load_syllable_features(path) -> np.ndarray:
    """Read per-word syllable features from CSV.

    Rows are ``syllable_index,f0_z,intensity_z,duration_s``; an optional
    header line is skipped. Rows are returned sorted by syllable index.
    """
    rows: list[tuple[int, float, float, float]] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for record in csv.reader(fh):
            if not record or not record[0].strip():
                continue
            first = record[0].strip()
            if not first.lstrip("-").isdigit():
                continue  # header
            if len(record) != 4:
                raise ValueError(f"expected 4 columns, got {len(record)}: {record}")
            rows.append(
                (int(first), float(record[1]), float(record[2]), float(record[3]))
            )
    if not rows:
        raise ValueError(f"no feature rows in {path}")
    rows.sort(key=lambda r: r[0])
    return np.array([[f0, inten, dur] for _, f0, inten, dur in rows], dtype=float)
