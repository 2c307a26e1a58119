import pytest
from hypothesis import given
from hypothesis import strategies as st

from pronkit.phonemes import (
    MissingStressDigitError,
    Phoneme,
    PhonemeInventory,
    PhonemeSeq,
    SentencePhonemes,
    StressOnConsonantError,
    StressPattern,
    UnknownSymbolError,
    parse_phoneme_seq,
    stress_pattern,
    strip_stress,
)

INV = PhonemeInventory.default()


class TestInventory:
    def test_default_size_excludes_blank(self):
        assert INV.size == 45
        assert INV.blank not in INV.symbols
        assert INV.blank_column == 45

    def test_specials_present(self):
        assert INV.pause == "pause"
        assert INV.eos == "eos"

    def test_vowels_are_the_stressable_symbols(self):
        assert INV.is_vowel("ae")
        assert not INV.is_vowel("k")
        assert not INV.is_vowel("pause")

    def test_duplicate_symbols_rejected(self):
        with pytest.raises(ValueError):
            PhonemeInventory(["a", "a"], ["a"])

    def test_from_file(self, tmp_path):
        table = tmp_path / "inv.txt"
        table.write_text("# comment\nk 0\nae 1\nt 0\n\npause 0\n")
        loaded = PhonemeInventory.from_file(table)
        assert loaded.symbols == ("k", "ae", "t", "pause")
        assert loaded.vowels == {"ae"}
        assert loaded.pause == "pause"
        assert loaded.eos is None

    def test_from_file_malformed(self, tmp_path):
        table = tmp_path / "inv.txt"
        table.write_text("k maybe\n")
        with pytest.raises(ValueError):
            PhonemeInventory.from_file(table)


class TestParse:
    def test_cat(self):
        seq = parse_phoneme_seq("k ae1 t", INV)
        assert seq.phones == (Phoneme("k"), Phoneme("ae", 1), Phoneme("t"))

    def test_empty_string_is_empty_sequence(self):
        assert len(parse_phoneme_seq("", INV)) == 0

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbolError) as err:
            parse_phoneme_seq("k zz t", INV)
        assert err.value.token == "zz"
        assert err.value.position == 1

    def test_stress_on_consonant(self):
        with pytest.raises(StressOnConsonantError):
            parse_phoneme_seq("k1 ae t", INV)

    def test_uppercase_accepted(self):
        seq = parse_phoneme_seq("G AA1 R AA0 ZH", INV)
        assert seq.to_text() == "g aa1 r aa0 zh"

    @given(
        st.lists(
            st.tuples(
                st.sampled_from(sorted(INV.symbols)),
                st.sampled_from([None, 0, 1, 2]),
            ),
            max_size=12,
        )
    )
    def test_roundtrip(self, items):
        phones = [
            Phoneme(sym, stress if INV.is_vowel(sym) else None)
            for sym, stress in items
        ]
        seq = PhonemeSeq(phones, INV)
        assert parse_phoneme_seq(seq.to_text(), INV) == seq


class TestStripStress:
    def test_single_vowel(self, seq):
        assert strip_stress(seq("ae1")).to_text() == "ae"

    def test_empty(self, seq):
        assert strip_stress(seq("")).to_text() == ""

    def test_word(self, seq):
        assert strip_stress(seq("k ae0 t")).to_text() == "k ae t"

    def test_length_preserved(self, seq):
        s = seq("s ih1 k s")
        assert len(strip_stress(s)) == len(s)


class TestStressPattern:
    def test_remind(self, seq):
        assert stress_pattern(seq("r iy1 m ay0 n d")).flags == (True, False)

    def test_garage(self, seq):
        assert stress_pattern(seq("g aa1 r aa0 zh")).flags == (True, False)

    def test_secondary_collapses_to_unstressed(self, seq):
        assert stress_pattern(seq("ae2 k ae1")).flags == (False, True)

    def test_no_vowels_gives_empty_pattern(self, seq):
        assert stress_pattern(seq("k t s")).flags == ()

    def test_missing_digit_raises(self, seq):
        with pytest.raises(MissingStressDigitError):
            stress_pattern(seq("k ae t"))

    def test_stripped_word_raises(self, seq):
        with pytest.raises(MissingStressDigitError):
            stress_pattern(strip_stress(seq("k ae1 t")))

    def test_stressed_index(self):
        assert StressPattern((False, True, False)).stressed_index() == 1
        with pytest.raises(ValueError):
            StressPattern((True, True)).stressed_index()


class TestSentencePhonemes:
    def test_flattened_is_concatenation(self, i_said):
        assert i_said.flattened.to_text() == "ay1 s eh1 d"

    def test_word_of_position_partitions(self, i_said):
        assert i_said.word_of_position == (0, 1, 1, 1)
        assert sum(len(s) for _, s in i_said.words) == len(i_said.flattened)

    def test_positions_of_word(self, i_said):
        assert list(i_said.positions_of_word(0)) == [0]
        assert list(i_said.positions_of_word(1)) == [1, 2, 3]

    @given(st.lists(st.integers(0, 4), min_size=1, max_size=6))
    def test_partition_property(self, lengths):
        words = [
            (f"w{k}", PhonemeSeq([Phoneme("k")] * n, INV))
            for k, n in enumerate(lengths)
        ]
        sent = SentencePhonemes(words)
        assert len(sent.word_of_position) == sum(lengths)
        for k in range(len(lengths)):
            assert [sent.word_of_position[i] for i in sent.positions_of_word(k)] == [
                k
            ] * lengths[k]
