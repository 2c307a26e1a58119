"""Phoneme-recognizer producers and corpus ingestion.

Real decoding is out of scope; the two producers here let the rest of the
pipeline run offline. The oracle reads off the ground-truth pronunciation
with one-hot posteriors; the noisy producer confuses each position with a
configurable rate and emits correspondingly soft posterior rows. Producers
are stateless: the per-utterance RNG is folded from the utterance id, so
concurrent or re-ordered calls give identical output.
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from .errors import PronkitError
from .phonemes import (
    Phoneme,
    PhonemeInventory,
    PhonemeSeq,
    SentencePhonemes,
    parse_phoneme_seq,
    strip_stress,
)

FEATURE_DIM = 80

_MAX_RESAMPLES_PER_HYPOTHESIS = 16


class ParseError(PronkitError):
    def __init__(self, line: int, detail: str):
        super().__init__(f"line {line}: {detail}")
        self.line = line
        self.detail = detail


class ProducerFailure(PronkitError):
    """A producer could not generate hypotheses for an utterance."""


@dataclass(frozen=True)
class Utterance:
    id: str
    speaker: str
    sentence: SentencePhonemes
    realized: PhonemeSeq | None = None
    word_votes: tuple[tuple[int, int], ...] | None = None  # (mispronounced, total)
    word_labels: tuple[int | None, ...] | None = None
    features: np.ndarray | None = None

    def __post_init__(self):
        if self.word_votes is not None:
            if len(self.word_votes) != len(self.sentence):
                raise ValueError("one vote pair per word required")
            for m, t in self.word_votes:
                if not 0 <= m <= t:
                    raise ValueError(f"votes {m}/{t} out of range")
        if self.word_labels is not None and len(self.word_labels) != len(self.sentence):
            raise ValueError("one label per word required")
        if self.features is not None and (
            self.features.ndim != 2 or self.features.shape[1] != FEATURE_DIM
        ):
            raise ValueError(f"feature matrix must be frames x {FEATURE_DIM}")

    def spoken(self) -> PhonemeSeq:
        """Ground-truth pronunciation: the realized sequence when known,
        otherwise a perfect reading of the canonical one."""
        return self.realized if self.realized is not None else self.sentence.flattened

    def label_of_word(self, k: int) -> int | None:
        if self.word_labels is not None and self.word_labels[k] is not None:
            return self.word_labels[k]
        if self.word_votes is not None:
            m, t = self.word_votes[k]
            return int(2 * m >= t)
        return None


@dataclass(frozen=True)
class Hypothesis:
    """One recognized sequence with per-position posteriors and a weight.

    ``posteriors`` has one row per recognized phoneme over all inventory
    symbols plus a final blank column; rows sum to one.
    """

    phones: PhonemeSeq
    posteriors: np.ndarray
    weight: float

    def __post_init__(self):
        inv = self.phones.inventory
        if self.posteriors.shape != (len(self.phones), inv.size + 1):
            raise ValueError(
                f"posterior shape {self.posteriors.shape} != "
                f"({len(self.phones)}, {inv.size + 1})"
            )
        if not 0 < self.weight <= 1:
            raise ValueError("weight must lie in (0, 1]")
        sums = self.posteriors.sum(axis=1)
        if len(sums) and np.max(np.abs(sums - 1.0)) > 1e-9:
            raise ValueError("posterior rows must sum to 1")

    def row(self, j: int) -> np.ndarray:
        return self.posteriors[j]


@dataclass(frozen=True)
class NBestResult:
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self):
        if not self.hypotheses:
            raise ValueError("need at least one hypothesis")
        weights = [h.weight for h in self.hypotheses]
        if any(w2 > w1 for w1, w2 in zip(weights, weights[1:])):
            raise ValueError("hypotheses must be ordered by non-increasing weight")
        if sum(weights) > 1 + 1e-9:
            raise ValueError("weights must sum to at most 1")

    @property
    def n(self) -> int:
        return len(self.hypotheses)

    @property
    def top(self) -> Hypothesis:
        return self.hypotheses[0]


class Producer(Protocol):
    def recognize(self, utterance: Utterance, n: int) -> NBestResult: ...


def _utterance_rng(seed: int, utterance_id: str) -> np.random.Generator:
    return np.random.default_rng([seed, zlib.crc32(utterance_id.encode("utf-8"))])


def _one_hot_rows(seq: PhonemeSeq) -> np.ndarray:
    inv = seq.inventory
    rows = np.zeros((len(seq), inv.size + 1))
    for j, p in enumerate(seq):
        rows[j, inv.index_of(p.symbol)] = 1.0
    return rows


class OracleRecognizer:
    """Returns the ground-truth pronunciation with one-hot posteriors."""

    def recognize(self, utterance: Utterance, n: int) -> NBestResult:
        if n < 1:
            raise ValueError("n must be >= 1")
        truth = strip_stress(utterance.spoken())
        hyp = Hypothesis(truth, _one_hot_rows(truth), 1.0)
        return NBestResult((hyp,))


class NoisyRecognizer:
    """Confuses each position independently with rate ``epsilon``.

    Each position hears the true symbol with probability 1 - epsilon and a
    uniformly random other symbol otherwise. Posterior rows put the bulk of
    the mass on the heard symbol and spread ``epsilon / (1 + concentration)``
    uniformly, so higher concentration sharpens rows toward one-hot. N-best
    hypotheses are distinct resamples with equal (renormalized) weights.
    """

    def __init__(self, epsilon: float, concentration: float = 1.0, seed: int = 0):
        if not 0 <= epsilon < 1:
            raise ValueError("epsilon must lie in [0, 1)")
        if concentration < 0:
            raise ValueError("concentration must be >= 0")
        self.epsilon = epsilon
        self.concentration = concentration
        self.seed = seed

    def _sample_sequence(
        self, truth: PhonemeSeq, rng: np.random.Generator
    ) -> tuple[PhonemeSeq, np.ndarray, float]:
        inv = truth.inventory
        uniform_mass = self.epsilon / (1.0 + self.concentration)
        rows = np.full((len(truth), inv.size + 1), 0.0)
        heard: list[Phoneme] = []
        raw_weight = 1.0
        for j, p in enumerate(truth):
            symbol = p.symbol
            if self.epsilon > 0 and rng.random() < self.epsilon:
                others = [s for s in inv.symbols if s != p.symbol]
                symbol = others[int(rng.integers(len(others)))]
            heard.append(Phoneme(symbol))
            rows[j, : inv.size] = uniform_mass / inv.size
            rows[j, inv.index_of(symbol)] += 1.0 - uniform_mass
            raw_weight *= rows[j, inv.index_of(symbol)]
        seq = PhonemeSeq(heard, inv)
        assert all(
            int(np.argmax(rows[j])) == inv.index_of(q.symbol) for j, q in enumerate(seq)
        ), "rows must argmax on the heard symbol"
        return seq, rows, raw_weight

    def recognize(self, utterance: Utterance, n: int) -> NBestResult:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = _utterance_rng(self.seed, utterance.id)
        truth = strip_stress(utterance.spoken())
        found: dict[tuple[str, ...], tuple[PhonemeSeq, np.ndarray, float]] = {}
        attempts = 0
        while len(found) < n and attempts < _MAX_RESAMPLES_PER_HYPOTHESIS * n:
            seq, rows, raw = self._sample_sequence(truth, rng)
            found.setdefault(seq.symbols(), (seq, rows, raw))
            attempts += 1
        total = sum(raw for _, _, raw in found.values())
        if total == 0:
            raise ProducerFailure(f"no usable hypotheses for {utterance.id!r}")
        hyps = [
            Hypothesis(seq, rows, raw / total)
            for seq, rows, raw in found.values()
        ]
        hyps.sort(key=lambda h: -h.weight)
        return NBestResult(tuple(hyps))


def oracle_recognizer() -> OracleRecognizer:
    return OracleRecognizer()


def noisy_recognizer(
    epsilon: float, concentration: float = 1.0, seed: int = 0
) -> NoisyRecognizer:
    return NoisyRecognizer(epsilon, concentration, seed)


def read_feature_matrix(path) -> np.ndarray:
    """Read a feature side-car: two little-endian uint32 (rows, cols),
    then row-major float32 values."""
    raw = Path(path).read_bytes()
    if len(raw) < 8:
        raise ValueError(f"{path}: truncated header")
    rows, cols = struct.unpack("<II", raw[:8])
    expected = 8 + 4 * rows * cols
    if len(raw) != expected:
        raise ValueError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=8)
    return data.reshape(rows, cols).astype(np.float64)


def write_feature_matrix(path, matrix: np.ndarray) -> None:
    m = np.asarray(matrix, dtype="<f4")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<II", m.shape[0], m.shape[1]))
        fh.write(m.tobytes(order="C"))


def _parse_utterance(record: dict, inventory: PhonemeInventory, base: Path) -> Utterance:
    words = []
    votes: list[tuple[int, int]] = []
    labels: list[int | None] = []
    has_votes = False
    has_labels = False
    for w in record["words"]:
        words.append((w["text"], parse_phoneme_seq(w["canonical"], inventory)))
        if "votes" in w:
            has_votes = True
            m, t = w["votes"]
            votes.append((int(m), int(t)))
        else:
            votes.append((0, 0))
        if "label" in w:
            has_labels = True
            labels.append(int(w["label"]))
        else:
            labels.append(None)
    sentence = SentencePhonemes(words)
    realized = None
    if record.get("realized") is not None:
        realized = parse_phoneme_seq(record["realized"], inventory)
    features = None
    if record.get("features"):
        features = read_feature_matrix(base / record["features"])
    if has_votes:
        for (m, t), (text, _) in zip(votes, words):
            if t == 0:
                raise ValueError(f"word {text!r} missing votes")
    return Utterance(
        id=str(record["id"]),
        speaker=str(record.get("speaker", "")),
        sentence=sentence,
        realized=realized,
        word_votes=tuple(votes) if has_votes else None,
        word_labels=tuple(labels) if has_labels else None,
        features=features,
    )


def load_corpus(path, inventory: PhonemeInventory | None = None) -> list[Utterance]:
    """Load a JSON-Lines corpus; one utterance object per line.

    Malformed lines raise :class:`ParseError` carrying the line number.
    """
    inventory = inventory or PhonemeInventory.default()
    base = Path(path).parent
    utterances: list[Utterance] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                utterances.append(_parse_utterance(record, inventory, base))
            except (KeyError, TypeError, ValueError, PronkitError) as exc:
                raise ParseError(lineno, str(exc)) from exc
    return utterances
