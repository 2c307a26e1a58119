import numpy as np
import pytest

from pronkit.align import OpKind, align
from pronkit.errorgen import (
    AugmentationRole,
    DegenerateInventoryError,
    MonosyllableInputError,
    NoPerturbationError,
    PerturbConfig,
    augmentation_plan,
    perturb,
    perturb_sentence,
    perturb_stress,
    word_labels,
)
from pronkit.errors import LengthMismatchError
from pronkit.phonemes import (
    Phoneme,
    PhonemeInventory,
    PhonemeSeq,
    StressPattern,
    parse_phoneme_seq,
    strip_stress,
)

INV = PhonemeInventory.default()


def seq(text):
    return parse_phoneme_seq(text, INV)


def cfg(**kwargs):
    kwargs.setdefault("inventory", INV)
    return PerturbConfig(**kwargs)


class TestPerturb:
    def test_zero_probability_is_identity(self):
        p = perturb(seq("k ae t s ih k s"), cfg(p_replace=0.0, seed=3))
        assert p.perturbed == p.original
        assert p.phoneme_labels == (0,) * 7

    def test_probability_one_replaces_everything(self):
        original = seq("k ae t")
        p = perturb(original, cfg(p_replace=1.0, seed=5))
        assert p.phoneme_labels == (1, 1, 1)
        for a, b in zip(original, p.perturbed):
            assert a.symbol != b.symbol

    def test_replacement_never_draws_specials(self):
        original = PhonemeSeq([Phoneme("k")] * 500, INV)
        p = perturb(original, cfg(p_replace=1.0, seed=9))
        drawn = {q.symbol for q in p.perturbed}
        assert "pause" not in drawn and "eos" not in drawn
        assert "k" not in drawn

    def test_labels_match_positional_diff(self):
        original = seq("k ae t s ih k s d ao g")
        p = perturb(original, cfg(p_replace=0.5, seed=123))
        expected = tuple(
            int(a.symbol != b.symbol) for a, b in zip(original, p.perturbed)
        )
        assert p.phoneme_labels == expected

    def test_replaced_fraction_in_binomial_interval(self):
        original = PhonemeSeq([Phoneme("k")] * 10_000, INV)
        p = perturb(original, cfg(p_replace=0.2, seed=42))
        fraction = sum(p.phoneme_labels) / len(p.phoneme_labels)
        assert 0.188 <= fraction <= 0.212

    def test_deterministic_given_seed(self):
        original = seq("k ae t s ih k s")
        a = perturb(original, cfg(p_replace=0.3, p_insert=0.1, p_delete=0.1, seed=77))
        b = perturb(original, cfg(p_replace=0.3, p_insert=0.1, p_delete=0.1, seed=77))
        assert a.perturbed == b.perturbed
        assert a.phoneme_labels == b.phoneme_labels

    def test_different_seeds_differ(self):
        original = PhonemeSeq([Phoneme("k")] * 50, INV)
        outs = {perturb(original, cfg(p_replace=0.5, seed=s)).perturbed.to_text() for s in range(5)}
        assert len(outs) > 1

    def test_insertions_and_deletions_change_length(self):
        original = PhonemeSeq([Phoneme("k")] * 200, INV)
        deleted = perturb(original, cfg(p_replace=0.0, p_delete=0.5, seed=1))
        inserted = perturb(original, cfg(p_replace=0.0, p_insert=0.5, seed=1))
        assert len(deleted.perturbed) < 200 < len(inserted.perturbed)
        # deletions are labeled at their canonical positions
        assert sum(deleted.phoneme_labels) == 200 - len(deleted.perturbed)

    def test_degenerate_inventory(self):
        tiny = PhonemeInventory(["k"], [])
        original = PhonemeSeq([Phoneme("k")], tiny)
        with pytest.raises(DegenerateInventoryError):
            perturb(original, PerturbConfig(inventory=tiny, p_replace=1.0))

    def test_bad_probability_rejected(self):
        with pytest.raises(ValueError):
            cfg(p_replace=1.5)


class TestWordLabels:
    def test_no_perturbation_all_zero(self, i_said):
        p = perturb(i_said.flattened, cfg(p_replace=0.0))
        assert word_labels(p, i_said) == [0, 0]

    def test_single_word_substitution(self, sentence):
        sent = sentence(("cat", "k ae1 t"))
        p = perturb(sent.flattened, cfg(p_replace=1.0, seed=2))
        assert word_labels(p, sent) == [1]

    def test_sub_in_third_word(self, sentence):
        sent = sentence(("a", "k ae"), ("b", "t s"), ("c", "ih k"))
        from pronkit.errorgen import LabeledPerturbation

        perturbed = seq("k ae t s ih t")
        p = LabeledPerturbation(sent.flattened, perturbed, (0, 0, 0, 0, 0, 1))
        assert word_labels(p, sent) == [0, 0, 1]

    def test_wrong_sentence_rejected(self, sentence):
        sent = sentence(("cat", "k ae1 t"))
        other = sentence(("dog", "d ao1 g"))
        p = perturb(sent.flattened, cfg(p_replace=0.0))
        with pytest.raises(LengthMismatchError):
            word_labels(p, other)

    def test_oracle_equivalence_replacements(self, sentence):
        # labels recomputed from scratch by per-word positional diff
        rng = np.random.default_rng(31)
        pool = [s for s in INV.regular_symbols()]
        for case in range(400):
            words = []
            for k in range(rng.integers(1, 5)):
                n = rng.integers(1, 5)
                words.append(
                    (f"w{k}", " ".join(pool[i] for i in rng.integers(0, len(pool), n)))
                )
            sent = sentence(*words)
            p = perturb(sent.flattened, cfg(p_replace=0.3, seed=case))
            got = word_labels(p, sent)
            expected = []
            for k in range(len(sent)):
                positions = sent.positions_of_word(k)
                expected.append(
                    int(
                        any(
                            p.original[j].symbol != p.perturbed[j].symbol
                            for j in positions
                        )
                    )
                )
            assert got == expected

    def test_oracle_equivalence_with_gaps(self, sentence):
        # with ins/del enabled, labels must agree with a fresh realignment
        rng = np.random.default_rng(13)
        pool = [s for s in INV.regular_symbols()]
        for case in range(200):
            words = []
            for k in range(rng.integers(1, 4)):
                n = rng.integers(1, 5)
                words.append(
                    (f"w{k}", " ".join(pool[i] for i in rng.integers(0, len(pool), n)))
                )
            sent = sentence(*words)
            p = perturb(
                sent.flattened,
                cfg(p_replace=0.2, p_insert=0.1, p_delete=0.1, seed=1000 + case),
            )
            got = word_labels(p, sent)
            a = align(strip_stress(sent.flattened), strip_stress(p.perturbed))
            expected = [0] * len(sent)
            last = None
            for op in a.ops:
                if op.kind is OpKind.INS:
                    expected[sent.word_of_position[last if last is not None else 0]] = 1
                    continue
                last = op.canonical_index
                if op.kind in (OpKind.SUB, OpKind.DEL):
                    expected[sent.word_of_position[op.canonical_index]] = 1
            assert got == expected


class TestPerturbStress:
    def test_two_syllables_flip(self):
        assert perturb_stress(StressPattern((True, False)), seed=0).flags == (False, True)
        assert perturb_stress(StressPattern((False, True)), seed=0).flags == (True, False)

    def test_output_always_differs_and_is_one_hot(self):
        pattern = StressPattern((False, True, False, False))
        for s in range(50):
            out = perturb_stress(pattern, seed=s)
            assert sum(out.flags) == 1
            assert out.stressed_index() != 1

    def test_uniform_over_alternatives(self):
        pattern = StressPattern((False, True, False))
        hits = {0: 0, 2: 0}
        n = 10_000
        for s in range(n):
            hits[perturb_stress(pattern, seed=s).stressed_index()] += 1
        assert abs(hits[0] / n - 0.5) <= 0.02
        assert abs(hits[2] / n - 0.5) <= 0.02

    def test_monosyllable_rejected(self):
        with pytest.raises(MonosyllableInputError):
            perturb_stress(StressPattern((True,)), seed=0)

    def test_input_unchanged(self):
        pattern = StressPattern((True, False))
        perturb_stress(pattern, seed=4)
        assert pattern.flags == (True, False)


class TestAugmentationPlan:
    def test_four_combinations(self):
        original, perturbed = seq("k ae t"), seq("k ey t")
        plan = augmentation_plan("wav1", original, perturbed)
        assert [(t.role, t.audio_ref, t.phonemes) for t in plan] == [
            (AugmentationRole.CORRECT, "wav1", original),
            (AugmentationRole.MISPRONOUNCED, "wav1", perturbed),
            (AugmentationRole.CORRECT, "synth://wav1", perturbed),
            (AugmentationRole.MISPRONOUNCED, "synth://wav1", original),
        ]

    def test_identical_sequences_rejected(self):
        s = seq("k ae t")
        with pytest.raises(NoPerturbationError):
            augmentation_plan("wav1", s, s)

    def test_correct_tuples_realize_their_own_phonemes(self):
        plan = augmentation_plan("wav1", seq("k ae t"), seq("k ey t"))
        by_audio = {"wav1": seq("k ae t"), "synth://wav1": seq("k ey t")}
        for t in plan:
            if t.role is AugmentationRole.CORRECT:
                assert t.phonemes == by_audio[t.audio_ref]


class TestPerturbSentence:
    def test_word_flags_cover_all_words(self, i_said):
        sp = perturb_sentence(i_said, cfg(p_replace=1.0, seed=0))
        assert sp.word_flags == (1, 1)
        assert len(sp.perturbation.phoneme_labels) == len(i_said.flattened)
