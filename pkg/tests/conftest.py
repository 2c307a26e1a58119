import pytest

from pronkit.phonemes import PhonemeInventory, SentencePhonemes, parse_phoneme_seq


@pytest.fixture(scope="session")
def inv():
    return PhonemeInventory.default()


@pytest.fixture
def seq(inv):
    def make(text):
        return parse_phoneme_seq(text, inv)

    return make


@pytest.fixture
def sentence(inv):
    def make(*words):
        return SentencePhonemes(
            [(text, parse_phoneme_seq(phones, inv)) for text, phones in words]
        )

    return make


@pytest.fixture
def i_said(sentence):
    """Two-word sentence: 'I said' -> /ay - s eh d/."""
    return make_i_said(sentence)


def make_i_said(sentence):
    return sentence(("i", "ay1"), ("said", "s eh1 d"))
