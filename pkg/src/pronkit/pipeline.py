"""End-to-end scoring: recognizer -> alignment -> likelihoods -> detector.

Three system variants are supported. PR_NOLIK forces recognition
posteriors to be one-hot and scores against the canonical pronunciation
only; PR_LIK keeps the soft posteriors but still admits only the canonical
pronunciation; PR_PM scores against a trained pronunciation model. The
experiment harness evaluates systems on a labeled corpus with the
precision-at-anchored-recall convention.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .align import OpKind, align
from .detector import (
    DecisionMode,
    DetectorConfig,
    WordErrorProbs,
    aggregate_word_probs,
    word_error_probs,
)
from .errors import PronkitError
from .metrics import (
    AgreementBand,
    EvalReport,
    PRCurve,
    auc,
    confusion,
    match_prevalence,
    pr_curve,
    severity_band,
    wilson_ci,
)
from .phonemes import PhonemeSeq, strip_stress
from .pronmodel import (
    MIN_LIKELIHOOD,
    LikelihoodSeq,
    PronunciationModel,
    combine,
    pm_likelihood,
)
from .recognizer import Hypothesis, NBestResult, Producer, Utterance


class NoLabelsError(PronkitError):
    """The corpus carries no word-level ground-truth labels."""


class SystemVariant(enum.Enum):
    PR_NOLIK = "pr"
    PR_LIK = "pr-lik"
    PR_PM = "pr-pm"


@dataclass(frozen=True)
class SystemConfig:
    variant: SystemVariant
    detector: DetectorConfig = DetectorConfig()
    pm: PronunciationModel | None = None

    def __post_init__(self):
        if self.variant is SystemVariant.PR_PM and self.pm is None:
            raise ValueError("the PR_PM variant needs a pronunciation model")


def _one_hot_nbest(nbest: NBestResult) -> NBestResult:
    """Clamp every posterior row to certainty about its own phoneme."""
    hyps = []
    for h in nbest.hypotheses:
        inv = h.phones.inventory
        rows = np.zeros_like(h.posteriors)
        for j, p in enumerate(h.phones):
            rows[j, inv.index_of(p.symbol)] = 1.0
        hyps.append(Hypothesis(h.phones, rows, 1.0 / nbest.n))
    return NBestResult(tuple(hyps))


def _posterior_likelihood(hyp: Hypothesis, canonical: PhonemeSeq) -> np.ndarray:
    """Pronunciation likelihood when only the canonical reading is native.

    Each canonical position scores the aligned posterior row's mass on the
    canonical symbol; deletions and insertions score zero (floored), since
    a single-pronunciation model admits neither.
    """
    inv = canonical.inventory
    a = align(strip_stress(canonical), strip_stress(hyp.phones))
    values = np.ones(len(canonical))
    last_canonical = None
    for op in a.ops:
        if op.kind is OpKind.INS:
            if len(values):
                host = last_canonical if last_canonical is not None else 0
                values[host] *= 0.0
            continue
        last_canonical = op.canonical_index
        if op.kind is OpKind.DEL:
            values[op.canonical_index] *= 0.0
        else:
            column = inv.index_of(canonical[op.canonical_index].symbol)
            values[op.canonical_index] *= hyp.row(op.recognized_index)[column]
    return values


def _clamp(values: np.ndarray) -> LikelihoodSeq:
    return LikelihoodSeq(tuple(min(1.0, max(float(v), MIN_LIKELIHOOD)) for v in values))


def score_utterance(
    utterance: Utterance, producer: Producer, system: SystemConfig
) -> WordErrorProbs:
    """Per-word mispronunciation probabilities for one utterance.

    Likelihoods are combined across the N-best hypotheses, each hypothesis
    is aligned and scored separately, and the per-hypothesis probabilities
    aggregate according to the detector's decision mode.
    """
    nbest = producer.recognize(utterance, system.detector.n_best)
    if system.variant is SystemVariant.PR_NOLIK:
        nbest = _one_hot_nbest(nbest)
    canonical = strip_stress(utterance.sentence.flattened)
    if system.variant is SystemVariant.PR_PM:
        likelihoods = combine(nbest, system.pm, canonical)
    else:
        acc = np.zeros(len(canonical))
        for h in nbest.hypotheses:
            acc += h.weight * _posterior_likelihood(h, canonical)
        likelihoods = _clamp(acc)
    per_hyp = [
        word_error_probs(
            align(canonical, strip_stress(h.phones)), likelihoods, utterance.sentence
        )
        for h in nbest.hypotheses
    ]
    return aggregate_word_probs(per_hyp, system.detector.decision_mode)


@dataclass(frozen=True)
class WordScore:
    utterance_id: str
    word_index: int
    word_text: str
    score: float
    label: int | None


def score_corpus(
    corpus: list[Utterance], producer: Producer, system: SystemConfig
) -> list[WordScore]:
    out: list[WordScore] = []
    for u in corpus:
        probs = score_utterance(u, producer, system)
        for k, (text, _) in enumerate(u.sentence.words):
            out.append(WordScore(u.id, k, text, probs.probs[k], u.label_of_word(k)))
    return out


def anchored_operating_point(
    curve: PRCurve, anchor_recall: float
) -> tuple[float, float, float]:
    """(threshold, precision, achieved recall) at the largest threshold
    whose recall reaches the anchor; falls back to the curve's end when no
    threshold reaches it."""
    for r, p, t in curve.points:
        if r >= anchor_recall:
            return t, p, r
    r, p, t = curve.points[-1]
    return t, p, r


def evaluate_scores(
    scores: list[float],
    labels: list[int],
    system: str,
    anchor_recall: float = 0.4,
) -> EvalReport:
    curve = pr_curve(scores, labels)
    threshold, prec, achieved = anchored_operating_point(curve, anchor_recall)
    flags = [int(s >= threshold) for s in scores]
    counts = confusion(flags, labels)
    return EvalReport(
        system=system,
        n_scored=len(scores),
        n_positive=sum(labels),
        auc=auc(curve),
        anchor_recall=anchor_recall,
        threshold=threshold,
        achieved_recall=achieved,
        precision=prec,
        precision_ci=wilson_ci(counts.tp, counts.tp + counts.fp)
        if counts.tp + counts.fp
        else (0.0, 1.0),
        recall_ci=wilson_ci(counts.tp, counts.tp + counts.fn),
        counts=counts,
        curve=curve,
    )


def severity_breakdown(
    word_scores: list[WordScore],
    votes: list[tuple[int, int] | None],
    anchor_recall: float = 0.4,
    target_prevalence: float | None = None,
    seed: int = 0,
) -> dict[str, dict[str, float]]:
    """AUC and anchored precision per inter-annotator-agreement band.

    Each band is evaluated on its own mispronounced words against all
    correctly pronounced words, optionally down-sampled to a target
    positive prevalence for cross-band comparability.
    """
    if len(word_scores) != len(votes):
        raise ValueError("one vote pair per scored word required")
    breakdown: dict[str, dict[str, float]] = {}
    negatives = [
        (ws.score, 0) for ws, v in zip(word_scores, votes) if ws.label == 0
    ]
    for band in AgreementBand:
        pos = [
            (ws.score, 1)
            for ws, v in zip(word_scores, votes)
            if ws.label == 1 and v is not None and severity_band(*v) is band
        ]
        if not pos:
            continue
        pool = pos + negatives
        scores = [s for s, _ in pool]
        labels = [y for _, y in pool]
        if target_prevalence is not None:
            rng = np.random.default_rng(seed)
            keep = match_prevalence(labels, target_prevalence, rng)
            scores = [scores[i] for i in keep]
            labels = [labels[i] for i in keep]
        curve = pr_curve(scores, labels)
        _, prec, achieved = anchored_operating_point(curve, anchor_recall)
        breakdown[band.value] = {
            "auc": auc(curve),
            "precision": prec,
            "recall": achieved,
            "n_positive": float(sum(labels)),
            "n_scored": float(len(labels)),
        }
    return breakdown


def run_experiment(
    corpus: list[Utterance],
    producer: Producer,
    systems: list[SystemConfig],
    anchor_recall: float = 0.4,
) -> dict[str, EvalReport]:
    """Score a labeled corpus under each system and evaluate the results."""
    reports: dict[str, EvalReport] = {}
    for system in systems:
        word_scores = score_corpus(corpus, producer, system)
        labeled = [ws for ws in word_scores if ws.label is not None]
        if not labeled:
            raise NoLabelsError("corpus has no word-level labels")
        report = evaluate_scores(
            [ws.score for ws in labeled],
            [ws.label for ws in labeled],
            system.variant.value,
            anchor_recall,
        )
        votes_by_key = {}
        for u in corpus:
            if u.word_votes is not None:
                for k, v in enumerate(u.word_votes):
                    votes_by_key[(u.id, k)] = v
        if votes_by_key:
            votes = [
                votes_by_key.get((ws.utterance_id, ws.word_index)) for ws in labeled
            ]
            report.severity_breakdown = severity_breakdown(
                labeled, votes, anchor_recall
            )
        reports[system.variant.value] = report
    return reports
