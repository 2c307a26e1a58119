import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pronkit.align import (
    AlignmentCosts,
    NotAnError,
    OpKind,
    Severity,
    align,
    severity_from_distance,
    word_edit_summaries,
)
from pronkit.errors import LengthMismatchError
from pronkit.phonemes import Phoneme, PhonemeInventory, PhonemeSeq

INV = PhonemeInventory.default()


def brute_force_min_cost(a, b, costs):
    """Exhaustive recursion over all global alignments; no memoization."""

    def go(i, j):
        if i == len(a) and j == len(b):
            return 0.0
        options = []
        if i < len(a) and j < len(b):
            step = costs.match if a[i] == b[j] else costs.substitution
            options.append(step + go(i + 1, j + 1))
        if i < len(a):
            options.append(costs.deletion + go(i + 1, j))
        if j < len(b):
            options.append(costs.insertion + go(i, j + 1))
        return min(options)

    return go(0, 0)


def seq(text):
    from pronkit.phonemes import parse_phoneme_seq

    return parse_phoneme_seq(text, INV)


def kinds(alignment):
    return [op.kind for op in alignment.ops]


class TestAlign:
    def test_missing_initial_phoneme(self):
        a = align(seq("ay s eh d"), seq("s eh d"))
        assert kinds(a) == [OpKind.DEL, OpKind.MATCH, OpKind.MATCH, OpKind.MATCH]
        assert a.total_cost == 1.0

    def test_identity(self):
        a = align(seq("s ih k s"), seq("s ih k s"))
        assert kinds(a) == [OpKind.MATCH] * 4
        assert a.total_cost == 0.0

    def test_single_substitution(self):
        a = align(seq("ay s eh d"), seq("ay s ey d"))
        assert kinds(a) == [OpKind.MATCH, OpKind.MATCH, OpKind.SUB, OpKind.MATCH]
        sub = a.ops[2]
        assert (sub.canonical_index, sub.recognized_index) == (2, 2)
        expected = brute_force_min_cost(
            seq("ay s eh d").symbols(), seq("ay s ey d").symbols(), AlignmentCosts()
        )
        assert a.total_cost == expected == 1.0

    def test_empty_sequences(self):
        assert align(seq(""), seq("")).ops == ()
        a = align(seq("k t"), seq(""))
        assert kinds(a) == [OpKind.DEL, OpKind.DEL]
        a = align(seq(""), seq("k t"))
        assert kinds(a) == [OpKind.INS, OpKind.INS]

    def test_structural_validity_random(self):
        rng = np.random.default_rng(7)
        symbols = ("k", "ae", "t", "s", "ih")
        for _ in range(200):
            a = [symbols[i] for i in rng.integers(0, 5, rng.integers(0, 7))]
            b = [symbols[i] for i in rng.integers(0, 5, rng.integers(0, 7))]
            sa = PhonemeSeq([Phoneme(s) for s in a], INV)
            sb = PhonemeSeq([Phoneme(s) for s in b], INV)
            align(sa, sb).validate()

    def test_matches_brute_force_on_small_pairs(self):
        rng = np.random.default_rng(11)
        symbols = ("k", "ae", "t", "s", "ih")
        costs = AlignmentCosts()
        for _ in range(300):
            a = [symbols[i] for i in rng.integers(0, 5, rng.integers(0, 7))]
            b = [symbols[i] for i in rng.integers(0, 5, rng.integers(0, 7))]
            sa = PhonemeSeq([Phoneme(s) for s in a], INV)
            sb = PhonemeSeq([Phoneme(s) for s in b], INV)
            assert align(sa, sb, costs).total_cost == brute_force_min_cost(a, b, costs)

    def test_asymmetric_costs(self):
        costs = AlignmentCosts(substitution=3.0, insertion=1.0, deletion=1.0)
        # substitution costlier than delete+insert: gap path must win
        a = align(seq("k"), seq("t"), costs)
        assert sorted(op.kind.value for op in a.ops) == ["del", "ins"]
        assert a.total_cost == 2.0

    def test_stress_ignored(self):
        a = align(seq("k ae t"), seq("k ae1 t"))
        assert kinds(a) == [OpKind.MATCH] * 3

    @given(st.data())
    def test_symmetry(self, data):
        symbols = ("k", "ae", "t", "s", "ih")
        a = data.draw(st.lists(st.sampled_from(symbols), max_size=6))
        b = data.draw(st.lists(st.sampled_from(symbols), max_size=6))
        sa = PhonemeSeq([Phoneme(s) for s in a], INV)
        sb = PhonemeSeq([Phoneme(s) for s in b], INV)
        assert align(sa, sb).total_cost == align(sb, sa).total_cost

    @given(st.data())
    def test_appending_shared_phoneme_adds_at_most_match(self, data):
        symbols = ("k", "ae", "t")
        a = data.draw(st.lists(st.sampled_from(symbols), max_size=5))
        b = data.draw(st.lists(st.sampled_from(symbols), max_size=5))
        extra = data.draw(st.sampled_from(symbols))
        costs = AlignmentCosts()
        base = align(
            PhonemeSeq([Phoneme(s) for s in a], INV),
            PhonemeSeq([Phoneme(s) for s in b], INV),
            costs,
        ).total_cost
        extended = align(
            PhonemeSeq([Phoneme(s) for s in a + [extra]], INV),
            PhonemeSeq([Phoneme(s) for s in b + [extra]], INV),
            costs,
        ).total_cost
        assert extended <= base + costs.match + 1e-12


class TestWordEditSummaries:
    def test_identity_alignment(self, i_said):
        a = align(i_said.flattened, i_said.flattened)
        summaries = word_edit_summaries(a, i_said)
        assert [s.phoneme_distance for s in summaries] == [0, 0]

    def test_single_sub_in_middle_word(self, sentence):
        sent = sentence(("a", "k"), ("b", "ae t"), ("c", "s"))
        a = align(sent.flattened, seq("k ae s s"))
        summaries = word_edit_summaries(a, sent)
        assert [s.phoneme_distance for s in summaries] == [0, 1, 0]

    def test_i_said_missing_ay(self, i_said):
        a = align(i_said.flattened, seq("s eh d"))
        summaries = word_edit_summaries(a, i_said)
        assert [s.phoneme_distance for s in summaries] == [1, 0]
        assert summaries[0].deletions == 1

    def test_insertion_attributed_to_preceding_word(self, i_said):
        a = align(i_said.flattened, seq("ay t s eh d"))
        summaries = word_edit_summaries(a, i_said)
        assert [s.insertions for s in summaries] == [1, 0]

    def test_insertion_before_everything_goes_to_first_word(self, i_said):
        a = align(i_said.flattened, seq("t ay s eh d"))
        summaries = word_edit_summaries(a, i_said)
        assert summaries[0].insertions == 1

    def test_length_mismatch(self, i_said, sentence):
        other = sentence(("x", "k t"))
        a = align(i_said.flattened, seq("ay s eh d"))
        with pytest.raises(LengthMismatchError):
            word_edit_summaries(a, other)

    def test_brute_force_attribution(self, i_said):
        # every word distance equals an independent per-word op count
        a = align(i_said.flattened, seq("s eh d"))
        by_word = {0: 0, 1: 0}
        for op in a.ops:
            if op.kind is OpKind.MATCH:
                continue
            owner = i_said.word_of_position[
                op.canonical_index if op.canonical_index is not None else 0
            ]
            by_word[owner] += 1
        summaries = word_edit_summaries(a, i_said)
        assert [s.phoneme_distance for s in summaries] == [by_word[0], by_word[1]]


class TestSeverity:
    @pytest.mark.parametrize(
        "distance,band",
        [
            (1, Severity.LOW),
            (2, Severity.MEDIUM),
            (3, Severity.HIGH),
            (4, Severity.VERY_HIGH),
            (9, Severity.VERY_HIGH),
        ],
    )
    def test_bands(self, distance, band):
        assert severity_from_distance(distance) is band

    def test_distance_zero_is_not_an_error(self):
        with pytest.raises(NotAnError):
            severity_from_distance(0)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            severity_from_distance(-1)
