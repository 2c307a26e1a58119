"""Native-pronunciation model and the N-best likelihood combiner.

The model is a position-factored confusion table: for each canonical
symbol, a smoothed probability distribution over the realized event (any
inventory symbol or a deletion), plus a global insertion rate. Trained
from aligned (canonical, realized) pairs, it scores how likely a native
speaker would realize each canonical position the way the student did;
the combiner averages those scores over recognition hypotheses, weighted
by hypothesis posterior.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .align import OpKind, align
from .errors import PronkitError
from .phonemes import PhonemeInventory, PhonemeSeq, SentencePhonemes, strip_stress
from .recognizer import NBestResult

DELETION_EVENT = "<deletion>"

MIN_LIKELIHOOD = 1e-12


class EmptyTrainingSetError(PronkitError):
    """No training pairs were supplied."""


class EmptyNBestError(PronkitError):
    """The combiner needs at least one hypothesis."""


@dataclass(frozen=True)
class LikelihoodSeq:
    """Per-canonical-position pronunciation likelihoods in (0, 1]."""

    values: tuple[float, ...]

    def __post_init__(self):
        if any(not 0 < v <= 1 for v in self.values):
            raise ValueError("likelihoods must lie in (0, 1]")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j: int) -> float:
        return self.values[j]

    def word_view(self, sentence: SentencePhonemes) -> list[tuple[float, ...]]:
        """Likelihoods grouped by word index."""
        if len(self.values) != len(sentence.flattened):
            raise ValueError("likelihood length does not match the sentence")
        return [
            tuple(self.values[j] for j in sentence.positions_of_word(k))
            for k in range(len(sentence))
        ]


class PronunciationModel:
    """Smoothed conditional distribution of realized events given canonicals."""

    def __init__(
        self,
        inventory: PhonemeInventory,
        table: Mapping[str, Mapping[str, float]],
        insertion_rate: float,
        alpha: float,
    ):
        self.inventory = inventory
        self.events = inventory.symbols + (DELETION_EVENT,)
        self.table = {c: dict(dist) for c, dist in table.items()}
        if not 0 <= insertion_rate <= 1:
            raise ValueError("insertion rate must lie in [0, 1]")
        self.insertion_rate = insertion_rate
        self.alpha = alpha
        self._verify()

    def _verify(self) -> None:
        for c, dist in self.table.items():
            if c not in self.inventory:
                raise ValueError(f"conditional for unknown symbol {c!r}")
            total = sum(dist.values())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"conditional for {c!r} sums to {total}, not 1")
            if any(p < 0 for p in dist.values()):
                raise ValueError(f"negative probability under {c!r}")
            unknown = set(dist) - set(self.events)
            if unknown:
                raise ValueError(f"unknown events under {c!r}: {sorted(unknown)}")

    def prob(self, canonical_symbol: str, event: str) -> float:
        """P(realized event | canonical symbol); the smoothing floor for
        symbols or events never seen in training."""
        dist = self.table.get(canonical_symbol)
        if dist is None:
            # unseen canonical symbol: pure smoothing over the event space
            if self.alpha > 0:
                return 1.0 / len(self.events)
            return 0.0
        return dist.get(event, 0.0)

    @classmethod
    def identity(cls, inventory: PhonemeInventory) -> "PronunciationModel":
        """Degenerate model: the only native realization is the canonical
        symbol itself. Used to switch the pronunciation model off."""
        table = {c: {c: 1.0} for c in inventory.symbols}
        return cls(inventory, table, insertion_rate=0.0, alpha=0.0)

    def to_json_dict(self) -> dict:
        doc: dict = {c: dict(sorted(dist.items())) for c, dist in sorted(self.table.items())}
        doc["insertion_rate"] = self.insertion_rate
        doc["alpha"] = self.alpha
        return doc

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path, inventory: PhonemeInventory | None = None) -> "PronunciationModel":
        inventory = inventory or PhonemeInventory.default()
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        insertion_rate = float(doc.pop("insertion_rate"))
        alpha = float(doc.pop("alpha"))
        return cls(inventory, doc, insertion_rate, alpha)


def train_pm(
    pairs: Iterable[tuple[PhonemeSeq, PhonemeSeq]],
    alpha: float = 0.1,
    inventory: PhonemeInventory | None = None,
) -> PronunciationModel:
    """Fit the confusion table from (canonical, realized) sequence pairs.

    Pairs are aligned with default Levenshtein costs; matches and
    substitutions count as symbol-to-symbol events, deletions as the
    deletion event, and insertions feed the global insertion rate. Counts
    are normalized with additive smoothing ``alpha`` over the event space.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyTrainingSetError("no training pairs")
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    inventory = inventory or pairs[0][0].inventory
    counts: dict[str, dict[str, float]] = {}
    insertions = 0
    positions = 0
    for canonical, realized in pairs:
        a = align(strip_stress(canonical), strip_stress(realized))
        canonical_symbols = canonical.symbols()
        realized_symbols = realized.symbols()
        positions += len(canonical_symbols)
        for op in a.ops:
            if op.kind is OpKind.INS:
                insertions += 1
                continue
            c = canonical_symbols[op.canonical_index]
            event = (
                DELETION_EVENT
                if op.kind is OpKind.DEL
                else realized_symbols[op.recognized_index]
            )
            by_event = counts.setdefault(c, {})
            by_event[event] = by_event.get(event, 0) + 1
    events = inventory.symbols + (DELETION_EVENT,)
    table: dict[str, dict[str, float]] = {}
    for c, observed in counts.items():
        total = sum(observed.values()) + alpha * len(events)
        if alpha > 0:
            table[c] = {e: (observed.get(e, 0) + alpha) / total for e in events}
        else:
            table[c] = {e: n / total for e, n in observed.items()}
    insertion_rate = insertions / positions if positions else 0.0
    return PronunciationModel(inventory, table, insertion_rate, alpha)


def pm_likelihood(
    pm: PronunciationModel, canonical: PhonemeSeq, realized: PhonemeSeq
) -> LikelihoodSeq:
    """Likelihood of each canonical position being realized as it was.

    The realized sequence is aligned to the canonical one; every canonical
    position scores the probability of its aligned event, and insertions
    multiply the insertion rate into the nearest preceding position (the
    first position when none precedes). Values are floored so a likelihood
    is never exactly zero.
    """
    a = align(strip_stress(canonical), strip_stress(realized))
    canonical_symbols = canonical.symbols()
    realized_symbols = realized.symbols()
    values = [1.0] * len(canonical_symbols)
    last_canonical = None
    for op in a.ops:
        if op.kind is OpKind.INS:
            if values:
                host = last_canonical if last_canonical is not None else 0
                values[host] *= pm.insertion_rate
            continue
        last_canonical = op.canonical_index
        c = canonical_symbols[op.canonical_index]
        event = (
            DELETION_EVENT
            if op.kind is OpKind.DEL
            else realized_symbols[op.recognized_index]
        )
        values[op.canonical_index] *= pm.prob(c, event)
    return LikelihoodSeq(tuple(min(1.0, max(v, MIN_LIKELIHOOD)) for v in values))


def combine(
    nbest: NBestResult, pm: PronunciationModel, canonical: PhonemeSeq
) -> LikelihoodSeq:
    """Expected pronunciation likelihood under the recognition hypotheses.

    Per canonical position, the hypothesis-weighted sum of per-hypothesis
    likelihoods, clamped into (0, 1].
    """
    if not nbest.hypotheses:
        raise EmptyNBestError("no hypotheses to combine")
    acc = np.zeros(len(canonical))
    for hyp in nbest.hypotheses:
        lik = pm_likelihood(pm, canonical, hyp.phones)
        acc += hyp.weight * np.asarray(lik.values)
    return LikelihoodSeq(tuple(min(1.0, max(v, MIN_LIKELIHOOD)) for v in acc))
