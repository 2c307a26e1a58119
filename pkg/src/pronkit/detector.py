"""Word-level pronunciation error detection.

Maps an alignment plus per-position pronunciation likelihoods to per-word
mispronunciation probabilities, applies the N-hypothesis decision rule,
and provides the weakly-supervised two-term loss, a weighted joint loss,
and a small exact Bayes posterior for enumerable event spaces.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np

from .align import Alignment, OpKind
from .errors import LengthMismatchError, PronkitError, ShapeMismatchError
from .phonemes import SentencePhonemes
from .pronmodel import LikelihoodSeq

_LOG_CLAMP = 1e-12


class ZeroEvidenceError(PronkitError):
    """Prior times likelihood vanishes for every error event."""


class DecisionMode(enum.Enum):
    """How per-hypothesis word error probabilities aggregate into flags.

    ALL_HYPOTHESES flags a word only when every hypothesis leaves its error
    probability above the threshold, i.e. no plausible hearing of the audio
    explains the word away. TOP_HYPOTHESIS thresholds the best hypothesis
    alone. ALL_BELOW_LITERAL keeps the (self-contradictory) literal rule
    "flag when the probability falls below the threshold for all
    hypotheses" purely for auditability; do not use it for real decisions.
    """

    ALL_HYPOTHESES = "all"
    TOP_HYPOTHESIS = "top"
    ALL_BELOW_LITERAL = "all-below-literal"


@dataclass(frozen=True)
class DetectorConfig:
    threshold: float = 0.5
    n_best: int = 4
    decision_mode: DecisionMode = DecisionMode.ALL_HYPOTHESES

    def __post_init__(self):
        if not 0 <= self.threshold <= 1:
            raise ValueError("threshold must lie in [0, 1]")
        if self.n_best < 1:
            raise ValueError("n_best must be >= 1")


@dataclass(frozen=True)
class WordErrorProbs:
    """Per-word mispronunciation probability plus the position that set it.

    ``positions[k]`` is the flattened canonical index whose likelihood was
    lowest among the word's mismatched positions, or None for a fully
    matched word (whose probability is 0).
    """

    probs: tuple[float, ...]
    positions: tuple[int | None, ...]

    def __len__(self) -> int:
        return len(self.probs)


def word_error_probs(
    alignment: Alignment, likelihoods: LikelihoodSeq, sentence: SentencePhonemes
) -> WordErrorProbs:
    """Per-word error probabilities from one alignment and its likelihoods.

    A word whose positions all matched scores 0. Otherwise the word scores
    1 - pi at its least likely mismatched position, where insertions count
    against the nearest preceding canonical position (the first word when
    none precedes).
    """
    owner = sentence.word_of_position
    if len(likelihoods) != len(owner):
        raise LengthMismatchError(
            f"{len(likelihoods)} likelihoods vs {len(owner)} canonical positions"
        )
    n_canonical = sum(
        1 for op in alignment.ops if op.kind in (OpKind.MATCH, OpKind.SUB, OpKind.DEL)
    )
    if n_canonical != len(owner):
        raise LengthMismatchError(
            f"alignment covers {n_canonical} canonical positions, sentence has {len(owner)}"
        )
    mismatched: list[list[int]] = [[] for _ in range(len(sentence))]
    last_canonical = None
    for op in alignment.ops:
        if op.kind is OpKind.INS:
            host = last_canonical if last_canonical is not None else 0
            if owner:
                mismatched[owner[host]].append(host)
            continue
        last_canonical = op.canonical_index
        if op.kind in (OpKind.SUB, OpKind.DEL):
            mismatched[owner[op.canonical_index]].append(op.canonical_index)
    probs: list[float] = []
    positions: list[int | None] = []
    for k in range(len(sentence)):
        if not mismatched[k]:
            probs.append(0.0)
            positions.append(None)
            continue
        j = min(mismatched[k], key=lambda i: likelihoods[i])
        probs.append(1.0 - likelihoods[j])
        positions.append(j)
    return WordErrorProbs(tuple(probs), tuple(positions))


def detect(
    per_hypothesis: Sequence[WordErrorProbs], cfg: DetectorConfig
) -> tuple[int, ...]:
    """Per-word binary flags from one WordErrorProbs per hypothesis."""
    if not per_hypothesis:
        raise ValueError("need word probabilities for at least one hypothesis")
    n_words = len(per_hypothesis[0])
    if any(len(w) != n_words for w in per_hypothesis):
        raise LengthMismatchError("hypotheses disagree on the number of words")
    flags = []
    for k in range(n_words):
        es = [w.probs[k] for w in per_hypothesis]
        if cfg.decision_mode is DecisionMode.ALL_HYPOTHESES:
            flags.append(int(min(es) > cfg.threshold))
        elif cfg.decision_mode is DecisionMode.TOP_HYPOTHESIS:
            flags.append(int(es[0] > cfg.threshold))
        else:  # ALL_BELOW_LITERAL
            flags.append(int(max(es) < cfg.threshold))
    return tuple(flags)


def aggregate_word_probs(
    per_hypothesis: Sequence[WordErrorProbs], mode: DecisionMode
) -> WordErrorProbs:
    """Collapse per-hypothesis probabilities into one score per word.

    The aggregate is chosen so that thresholding it reproduces
    :func:`detect` under the same mode (min across hypotheses for the
    all-hypotheses rule, the top hypothesis otherwise).
    """
    if not per_hypothesis:
        raise ValueError("need word probabilities for at least one hypothesis")
    if mode is DecisionMode.TOP_HYPOTHESIS:
        return per_hypothesis[0]
    n_words = len(per_hypothesis[0])
    probs: list[float] = []
    positions: list[int | None] = []
    for k in range(n_words):
        best = min(per_hypothesis, key=lambda w: w.probs[k])
        probs.append(best.probs[k])
        positions.append(best.positions[k])
    return WordErrorProbs(tuple(probs), tuple(positions))


def _clamped_log(p: float) -> float:
    return math.log(min(max(p, _LOG_CLAMP), 1.0 - _LOG_CLAMP))


def multitask_loss(
    word_probs: Sequence[float],
    word_labels: Sequence[int],
    phoneme_posteriors: np.ndarray | None = None,
    phoneme_labels: Sequence[int] | None = None,
) -> float:
    """Two-term weakly-supervised loss.

    Binary cross-entropy of the word-level mispronunciation probabilities
    plus, when phoneme labels exist, the cross-entropy of the phoneme
    posteriors against them. Untranscribed speech drops the second term.
    Natural logs; probabilities clamped away from 0 and 1.
    """
    if len(word_probs) != len(word_labels):
        raise ShapeMismatchError(f"{len(word_probs)} probs vs {len(word_labels)} labels")
    loss = 0.0
    for p, y in zip(word_probs, word_labels):
        loss -= _clamped_log(p) if y else _clamped_log(1.0 - p)
    if phoneme_labels is None:
        return loss
    if phoneme_posteriors is None:
        raise ShapeMismatchError("phoneme labels given without posteriors")
    posteriors = np.asarray(phoneme_posteriors, dtype=float)
    if posteriors.ndim != 2 or posteriors.shape[0] != len(phoneme_labels):
        raise ShapeMismatchError(
            f"posterior shape {posteriors.shape} vs {len(phoneme_labels)} labels"
        )
    for j, label in enumerate(phoneme_labels):
        if not 0 <= label < posteriors.shape[1]:
            raise ShapeMismatchError(f"label {label} outside posterior columns")
        loss -= _clamped_log(float(posteriors[j, label]))
    return loss


def weighted_joint_loss(ce: float, recon_l2: float, alpha: float) -> float:
    """Convex combination of a classification and a reconstruction loss."""
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * ce + (1.0 - alpha) * recon_l2


def bayes_error_posterior(
    prior: Mapping[Hashable, float],
    likelihood: Mapping[Hashable, Mapping[Hashable, float]],
    evidence: Hashable,
) -> dict[Hashable, float]:
    """Exact posterior over error events given one piece of evidence.

    ``prior[e]`` and ``likelihood[e][s]`` must already be conditioned on
    the canonical pronunciation; the posterior is proportional to prior
    times likelihood of the observed evidence, normalized over events.
    Serves as the exact-inference oracle on small enumerable spaces.
    """
    weights: dict[Hashable, float] = {}
    for event, p in prior.items():
        if p < 0:
            raise ValueError(f"negative prior for {event!r}")
        lik_table = likelihood.get(event)
        if lik_table is None:
            raise ValueError(f"likelihood table missing event {event!r}")
        lik = lik_table.get(evidence, 0.0)
        if lik < 0:
            raise ValueError(f"negative likelihood for {event!r}")
        weights[event] = p * lik
    total = sum(weights.values())
    if total == 0:
        raise ZeroEvidenceError(f"evidence {evidence!r} impossible under every event")
    return {event: w / total for event, w in weights.items()}
