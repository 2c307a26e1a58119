"""Global alignment of canonical vs. recognized phoneme sequences.

Classic Needleman-Wunsch dynamic programming in cost-minimization form,
plus per-word edit summaries and the phoneme-distance severity bands.
Stress digits are ignored throughout: alignment compares segmental
identity only.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import LengthMismatchError, PronkitError
from .phonemes import PhonemeSeq, SentencePhonemes


class NotAnError(PronkitError):
    """Raised for phoneme distance 0: a fully matched word has no severity."""


class OpKind(enum.Enum):
    MATCH = "match"
    SUB = "sub"
    INS = "ins"
    DEL = "del"


class Severity(enum.Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    VERY_HIGH = "very_high"


@dataclass(frozen=True)
class AlignmentCosts:
    """Edit costs; totals are minimized. Defaults are plain Levenshtein."""

    match: float = 0.0
    substitution: float = 1.0
    insertion: float = 1.0
    deletion: float = 1.0

    def __post_init__(self):
        if self.substitution <= 0 or self.insertion <= 0 or self.deletion <= 0:
            raise ValueError("substitution/insertion/deletion costs must be > 0")
        if self.match > 0:
            raise ValueError("match score must be <= 0 under the cost convention")


@dataclass(frozen=True)
class AlignOp:
    """One alignment step. DEL consumes only the canonical index, INS only
    the recognized index; MATCH/SUB consume both."""

    kind: OpKind
    canonical_index: int | None
    recognized_index: int | None


@dataclass(frozen=True)
class Alignment:
    ops: tuple[AlignOp, ...]
    total_cost: float

    def validate(self) -> None:
        """Check the monotone-traversal invariants; raises on violation."""
        want_ci = 0
        want_ri = 0
        for op in self.ops:
            if op.kind in (OpKind.MATCH, OpKind.SUB, OpKind.DEL):
                if op.canonical_index != want_ci:
                    raise ValueError("canonical indices must be consumed in order")
                want_ci += 1
            elif op.canonical_index is not None:
                raise ValueError("INS must not carry a canonical index")
            if op.kind in (OpKind.MATCH, OpKind.SUB, OpKind.INS):
                if op.recognized_index != want_ri:
                    raise ValueError("recognized indices must be consumed in order")
                want_ri += 1
            elif op.recognized_index is not None:
                raise ValueError("DEL must not carry a recognized index")


def align(
    canonical: PhonemeSeq,
    recognized: PhonemeSeq,
    costs: AlignmentCosts = AlignmentCosts(),
) -> Alignment:
    """Minimum-cost global alignment of two phoneme sequences.

    Deterministic: when costs tie, MATCH/SUB is preferred over DEL over
    INS, both while filling the table and during traceback.
    """
    a = canonical.symbols()
    b = recognized.symbols()
    n, m = len(a), len(b)

    # cost[i][j] = best cost aligning a[:i] with b[:j]
    cost = [[0.0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0] = cost[i - 1][0] + costs.deletion
    for j in range(1, m + 1):
        cost[0][j] = cost[0][j - 1] + costs.insertion
    for i in range(1, n + 1):
        row = cost[i]
        prev = cost[i - 1]
        ai = a[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (costs.match if ai == b[j - 1] else costs.substitution)
            up = prev[j] + costs.deletion
            left = row[j - 1] + costs.insertion
            best = diag
            if up < best:
                best = up
            if left < best:
                best = left
            row[j] = best

    ops: list[AlignOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        here = cost[i][j]
        if i > 0 and j > 0:
            step = costs.match if a[i - 1] == b[j - 1] else costs.substitution
            if cost[i - 1][j - 1] + step == here:
                kind = OpKind.MATCH if a[i - 1] == b[j - 1] else OpKind.SUB
                ops.append(AlignOp(kind, i - 1, j - 1))
                i -= 1
                j -= 1
                continue
        if i > 0 and cost[i - 1][j] + costs.deletion == here:
            ops.append(AlignOp(OpKind.DEL, i - 1, None))
            i -= 1
            continue
        ops.append(AlignOp(OpKind.INS, None, j - 1))
        j -= 1
    ops.reverse()
    return Alignment(tuple(ops), cost[n][m])


@dataclass(frozen=True)
class WordEditSummary:
    word_index: int
    matches: int
    substitutions: int
    insertions: int
    deletions: int

    @property
    def phoneme_distance(self) -> int:
        return self.substitutions + self.insertions + self.deletions


def word_edit_summaries(
    alignment: Alignment, sentence: SentencePhonemes
) -> list[WordEditSummary]:
    """Per-word edit counts for an alignment against a sentence's canonicals.

    Insertions are attributed to the word of the nearest preceding canonical
    position (to the first word when none precedes).
    """
    owner = sentence.word_of_position
    n_canonical = sum(
        1 for op in alignment.ops if op.kind in (OpKind.MATCH, OpKind.SUB, OpKind.DEL)
    )
    if n_canonical != len(owner):
        raise LengthMismatchError(
            f"alignment covers {n_canonical} canonical positions, sentence has {len(owner)}"
        )
    counts = {k: [0, 0, 0, 0] for k in range(len(sentence))}  # match, sub, ins, del
    last_canonical = None
    for op in alignment.ops:
        if op.kind is OpKind.INS:
            host = owner[last_canonical] if last_canonical is not None else 0
            counts[host][2] += 1
            continue
        last_canonical = op.canonical_index
        k = owner[op.canonical_index]
        if op.kind is OpKind.MATCH:
            counts[k][0] += 1
        elif op.kind is OpKind.SUB:
            counts[k][1] += 1
        else:
            counts[k][3] += 1
    return [
        WordEditSummary(k, c[0], c[1], c[2], c[3]) for k, c in sorted(counts.items())
    ]


def severity_from_distance(distance: int) -> Severity:
    """Severity band of a mispronounced word by its phoneme distance."""
    if distance == 0:
        raise NotAnError("phoneme distance 0 means the word is not mispronounced")
    if distance < 0:
        raise ValueError("phoneme distance cannot be negative")
    if distance == 1:
        return Severity.LOW
    if distance == 2:
        return Severity.MEDIUM
    if distance == 3:
        return Severity.HIGH
    return Severity.VERY_HIGH
