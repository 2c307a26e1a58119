"""Synthetic mispronunciation generation by phoneme-level perturbation.

Canonical sequences are perturbed with per-position replacements (and
optionally insertions/deletions), labeled at the phoneme and word level,
and expanded into the four-way augmentation plan that pairs real and
to-be-synthesized audio with correct and perturbed transcriptions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .align import OpKind, align
from .errors import LengthMismatchError, PronkitError
from .phonemes import (
    Phoneme,
    PhonemeInventory,
    PhonemeSeq,
    SentencePhonemes,
    StressPattern,
    strip_stress,
)


class DegenerateInventoryError(PronkitError):
    """Too few symbols to draw a replacement from."""


class MonosyllableInputError(PronkitError):
    """Single-syllable words carry no contrastive stress to perturb."""


class NoPerturbationError(PronkitError):
    """The perturbed sequence equals the original."""


@dataclass(frozen=True)
class PerturbConfig:
    """Per-position perturbation probabilities plus the RNG seed.

    Replacement at 0.2 with insertions/deletions off matches the rate used
    to corrupt native transcriptions at scale; all three edit kinds are
    supported for completeness.
    """

    inventory: PhonemeInventory
    p_replace: float = 0.2
    p_insert: float = 0.0
    p_delete: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("p_replace", "p_insert", "p_delete"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @property
    def edits_preserve_length(self) -> bool:
        return self.p_insert == 0.0 and self.p_delete == 0.0


@dataclass(frozen=True)
class LabeledPerturbation:
    """A perturbed sequence with per-canonical-position error labels.

    With replacements only, ``phoneme_labels[j]`` is 1 exactly when the
    symbols at position j differ. With insertions/deletions enabled the
    labels mark canonical positions touched by a substitution or deletion
    under a fresh minimum-cost realignment (insertions surface at the word
    level only).
    """

    original: PhonemeSeq
    perturbed: PhonemeSeq
    phoneme_labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.phoneme_labels) != len(self.original):
            raise LengthMismatchError("one phoneme label per original position")


def _draw_replacement(symbol: str, pool: tuple[str, ...], rng: np.random.Generator) -> str:
    choices = [s for s in pool if s != symbol]
    return choices[int(rng.integers(len(choices)))]


def perturb(seq: PhonemeSeq, cfg: PerturbConfig) -> LabeledPerturbation:
    """Randomly corrupt a phoneme sequence, deterministically per seed.

    Each position is independently deleted with ``p_delete``, otherwise
    replaced with ``p_replace`` by a uniformly drawn *different* symbol;
    after each surviving or replaced position a uniform random symbol is
    inserted with ``p_insert``. Pause/eos/blank are never drawn. Stress
    digits do not count as differences and replacements carry none.
    """
    pool = cfg.inventory.regular_symbols()
    if len(pool) < 2:
        raise DegenerateInventoryError("need at least two non-special symbols")
    rng = np.random.default_rng(cfg.seed)
    out: list[Phoneme] = []
    labels: list[int] = []
    for p in seq:
        if cfg.p_delete > 0 and rng.random() < cfg.p_delete:
            labels.append(1)
        elif cfg.p_replace > 0 and rng.random() < cfg.p_replace:
            out.append(Phoneme(_draw_replacement(p.symbol, pool, rng)))
            labels.append(1)
        else:
            out.append(p)
            labels.append(0)
        if cfg.p_insert > 0 and rng.random() < cfg.p_insert:
            out.append(Phoneme(pool[int(rng.integers(len(pool)))]))
    perturbed = PhonemeSeq(out, seq.inventory)
    if not cfg.edits_preserve_length:
        labels = _labels_by_realignment(seq, perturbed)
    return LabeledPerturbation(seq, perturbed, tuple(labels))


def _labels_by_realignment(original: PhonemeSeq, perturbed: PhonemeSeq) -> list[int]:
    alignment = align(strip_stress(original), strip_stress(perturbed))
    labels = [0] * len(original)
    for op in alignment.ops:
        if op.kind in (OpKind.SUB, OpKind.DEL):
            labels[op.canonical_index] = 1
    return labels


def word_labels(p: LabeledPerturbation, sentence: SentencePhonemes) -> list[int]:
    """Per-word mispronunciation labels for a perturbation of a sentence.

    A word is flagged when at least one of its phoneme pairs differs:
    positional comparison when lengths are preserved, otherwise via a
    minimum-cost realignment (insertions flag the word of the nearest
    preceding canonical position).
    """
    if p.original != sentence.flattened:
        raise LengthMismatchError("perturbation does not belong to this sentence")
    flags = [0] * len(sentence)
    owner = sentence.word_of_position
    if len(p.original) == len(p.perturbed):
        for j, (a, b) in enumerate(zip(p.original, p.perturbed)):
            if a.symbol != b.symbol:
                flags[owner[j]] = 1
        return flags
    alignment = align(strip_stress(p.original), strip_stress(p.perturbed))
    last_canonical = None
    for op in alignment.ops:
        if op.kind is OpKind.INS:
            host = owner[last_canonical] if last_canonical is not None else 0
            flags[host] = 1
            continue
        last_canonical = op.canonical_index
        if op.kind in (OpKind.SUB, OpKind.DEL):
            flags[owner[op.canonical_index]] = 1
    return flags


def perturb_stress(pattern: StressPattern, seed: int) -> StressPattern:
    """Move a word's single stress to a uniformly chosen other syllable."""
    if len(pattern) < 2:
        raise MonosyllableInputError("stress perturbation needs >= 2 syllables")
    current = pattern.stressed_index()
    rng = np.random.default_rng(seed)
    candidates = [i for i in range(len(pattern)) if i != current]
    target = candidates[int(rng.integers(len(candidates)))]
    return StressPattern(tuple(i == target for i in range(len(pattern))))


class AugmentationRole(enum.Enum):
    """Whether a tuple's transcription is what its audio actually realizes."""

    CORRECT = "correct"
    MISPRONOUNCED = "mispronounced"


@dataclass(frozen=True)
class AugmentationTuple:
    role: AugmentationRole
    audio_ref: str
    phonemes: PhonemeSeq


def synth_ref(audio_ref: str) -> str:
    """Placeholder reference for audio an external synthesizer must render."""
    return f"synth://{audio_ref}"


def augmentation_plan(
    audio_ref: str, original: PhonemeSeq, perturbed: PhonemeSeq
) -> tuple[AugmentationTuple, AugmentationTuple, AugmentationTuple, AugmentationTuple]:
    """Expand one recording into the four augmentation combinations.

    The real audio is correct against its own transcription and
    mispronounced against the perturbed one; a synthesized rendering of the
    perturbed sequence (placeholder reference) is correct against the
    perturbed transcription and mispronounced against the original.
    """
    if original == perturbed:
        raise NoPerturbationError("original and perturbed sequences are identical")
    synthesized = synth_ref(audio_ref)
    return (
        AugmentationTuple(AugmentationRole.CORRECT, audio_ref, original),
        AugmentationTuple(AugmentationRole.MISPRONOUNCED, audio_ref, perturbed),
        AugmentationTuple(AugmentationRole.CORRECT, synthesized, perturbed),
        AugmentationTuple(AugmentationRole.MISPRONOUNCED, synthesized, original),
    )


@dataclass(frozen=True)
class SentencePerturbation:
    """Perturbation of a sentence's flattened canonicals plus word labels."""

    perturbation: LabeledPerturbation
    word_flags: tuple[int, ...]


def perturb_sentence(sentence: SentencePhonemes, cfg: PerturbConfig) -> SentencePerturbation:
    p = perturb(sentence.flattened, cfg)
    return SentencePerturbation(p, tuple(word_labels(p, sentence)))
